#include "refgame/world/grammar.hpp"

#include <stdexcept>

#include "refgame/nnkit/rng.hpp"

namespace rg::world {

std::vector<TaggedWord> realize(const AttributeSchema& schema, const Scene& scene,
                                std::uint64_t grammar_seed) {
  if (scene.objects.empty()) throw std::invalid_argument("realize: scene has no objects");
  // Synonymous adjective orders; the pick is a pure function of (seed, scene
  // attributes) so equal layouts caption equally.
  const bool color_first = (derive_seed(grammar_seed, scene.attribute_hash()) & 1ull) != 0;

  std::vector<TaggedWord> out;
  auto emit_object = [&](const SceneObject& o) {
    out.push_back({"a", PosTag::kDet});
    const TaggedWord size{schema.sizes.at(o.size), PosTag::kAdj};
    const TaggedWord color{schema.colors.at(o.color), PosTag::kAdj};
    if (color_first) {
      out.push_back(color);
      out.push_back(size);
    } else {
      out.push_back(size);
      out.push_back(color);
    }
    out.push_back({schema.shapes.at(o.shape), PosTag::kNoun});
  };

  emit_object(scene.objects[0]);
  for (std::size_t k = 1; k < scene.objects.size(); ++k) {
    const SceneRelation& rel = scene.relations.at(k - 1);
    out.push_back({"is", PosTag::kVerb});
    out.push_back({schema.relations.at(rel.relation), PosTag::kAdp});
    emit_object(scene.objects[k]);
  }
  return out;
}

std::vector<TaggedWord> terminals(const AttributeSchema& schema) {
  std::vector<TaggedWord> out;
  out.push_back({"a", PosTag::kDet});
  out.push_back({"is", PosTag::kVerb});
  for (const auto& w : schema.sizes) out.push_back({w, PosTag::kAdj});
  for (const auto& w : schema.colors) out.push_back({w, PosTag::kAdj});
  for (const auto& w : schema.shapes) out.push_back({w, PosTag::kNoun});
  for (const auto& w : schema.relations) out.push_back({w, PosTag::kAdp});
  return out;
}

std::optional<PosTag> tag_of(const AttributeSchema& schema, std::string_view word) {
  for (const auto& t : terminals(schema)) {
    if (t.word == word) return t.tag;
  }
  return std::nullopt;
}

std::size_t max_caption_length(const AttributeSchema& schema) {
  return 4 + 6 * (static_cast<std::size_t>(schema.max_objects) - 1);
}

}  // namespace rg::world
