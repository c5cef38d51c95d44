#pragma once

#include <cstdint>
#include <vector>

#include "refgame/world/types.hpp"

namespace rg::world {

// Uniform sampling over object count, attributes, and relations; the k-th
// object (k >= 1) is related to object k-1 by one uniformly drawn relation.
Scene generate_scene(const AttributeSchema& schema, std::uint64_t rng_seed);

// Fixed seeded Gaussian random projection of the scene's concatenated one-hot
// attribute encoding. The projection is created once per dataset; rendering
// with zero noise is then a pure function of the scene's attributes.
class Renderer {
 public:
  Renderer(const AttributeSchema& schema, std::uint32_t d_img, std::uint64_t proj_seed);

  std::uint32_t d_img() const { return d_img_; }
  std::uint32_t onehot_dim() const { return onehot_dim_; }

  std::vector<double> encode_onehot(const Scene& scene) const;

  // Projection plus per-coordinate Gaussian noise of the given std. Throws
  // std::invalid_argument when noise_std < 0.
  RenderedImage render(const Scene& scene, double noise_std, std::uint64_t noise_seed) const;

 private:
  std::uint32_t d_img_ = 0;
  std::uint32_t onehot_dim_ = 0;
  std::uint32_t max_objects_ = 0;
  std::uint32_t shapes_ = 0, colors_ = 0, sizes_ = 0, relations_ = 0;
  std::vector<double> proj_;  // [d_img, onehot_dim]
};

// Realized caption encoded against a vocabulary. Throws when a realized word
// is missing from the vocabulary.
Caption caption_scene(const AttributeSchema& schema, const Scene& scene,
                      std::uint64_t grammar_seed, const Vocabulary& vocab);

struct Dataset {
  DatasetSplit split;
  Vocabulary vocab;
};

struct WorldConfig {
  AttributeSchema schema = AttributeSchema::defaults();
  std::uint32_t n_items = 10000;
  std::uint32_t d_img = 64;
  double noise_std = 0.05;
  std::uint32_t vocab_cap = 200;
  std::uint64_t seed = 1;
};

// Generates scenes, renders features, realizes captions, builds the
// vocabulary from all caption tokens plus the reserved ids, and splits
// 80/10/10 by shuffled scene id. Fully reproducible from the config.
Dataset build_dataset(const WorldConfig& cfg);

// All items of one split reassembled in global id order together with split
// labels; convenience for corpus serialization.
std::vector<const DatasetItem*> items_by_id(const DatasetSplit& split,
                                            std::vector<const char*>* labels = nullptr);

}  // namespace rg::world
