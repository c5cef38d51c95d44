#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rg::world {

enum class PosTag : std::uint8_t { kDet, kAdj, kNoun, kAdp, kVerb };

std::string_view to_string(PosTag tag);
std::optional<PosTag> pos_tag_from_string(std::string_view s);

// Attribute inventory of the synthetic world. Captions realize one template
// per scene, so max_objects is capped where the 20-token utterance budget
// would overflow.
struct AttributeSchema {
  std::vector<std::string> shapes;
  std::vector<std::string> colors;
  std::vector<std::string> sizes;
  std::vector<std::string> relations;
  std::uint32_t max_objects = 2;

  void validate() const;  // throws rg::ConfigError

  static AttributeSchema defaults();
};

struct SceneObject {
  std::uint32_t shape = 0;
  std::uint32_t color = 0;
  std::uint32_t size = 0;
  bool operator==(const SceneObject&) const = default;
};

struct SceneRelation {
  std::uint32_t relation = 0;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  bool operator==(const SceneRelation&) const = default;
};

struct Scene {
  std::uint64_t id = 0;
  std::vector<SceneObject> objects;
  std::vector<SceneRelation> relations;

  // Hash of attributes only (not id); identical layouts hash identically.
  std::uint64_t attribute_hash() const;
};

struct RenderedImage {
  std::vector<double> features;
};

struct Caption {
  std::vector<std::uint32_t> tokens;
  std::vector<PosTag> tags;
};

// Token <-> id map with dense ids; 0/1/2 are reserved for PAD/BOS/EOS.
class Vocabulary {
 public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kBos = 1;
  static constexpr std::uint32_t kEos = 2;
  static constexpr std::uint32_t kReservedCount = 3;

  Vocabulary();

  std::uint32_t add(const std::string& token, std::optional<PosTag> tag);
  std::optional<std::uint32_t> id_of(std::string_view token) const;
  const std::string& token(std::uint32_t id) const;
  std::optional<PosTag> tag(std::uint32_t id) const;
  std::uint32_t size() const { return static_cast<std::uint32_t>(tokens_.size()); }
  bool is_reserved(std::uint32_t id) const { return id < kReservedCount; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::optional<PosTag>> tags_;
  std::map<std::string, std::uint32_t, std::less<>> ids_;
};

struct DatasetItem {
  Scene scene;
  RenderedImage image;
  Caption caption;
};

struct DatasetSplit {
  std::vector<DatasetItem> train;
  std::vector<DatasetItem> val;
  std::vector<DatasetItem> test;
  std::uint64_t split_seed = 0;

  std::size_t total() const { return train.size() + val.size() + test.size(); }
};

}  // namespace rg::world
