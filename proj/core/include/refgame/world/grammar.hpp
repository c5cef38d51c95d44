#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "refgame/world/types.hpp"

namespace rg::world {

// Template grammar over the schema's attribute words.
//
//   one object:   a <size> <color> <shape>
//   two objects:  a <size> <color> <shape> is <relation> a <size> <color> <shape>
//
// POS by slot: a -> DET, size/color -> ADJ, shape -> NOUN, is -> VERB,
// relation -> ADP. The grammar seed picks among synonymous templates (the
// adjective order, size-color vs color-size), deterministically per scene.

struct TaggedWord {
  std::string word;
  PosTag tag;
};

// Deterministic realization of a scene as caption words.
std::vector<TaggedWord> realize(const AttributeSchema& schema, const Scene& scene,
                                std::uint64_t grammar_seed);

// Every terminal the grammar can produce, with its tag. Each terminal has
// exactly one tag.
std::vector<TaggedWord> terminals(const AttributeSchema& schema);

std::optional<PosTag> tag_of(const AttributeSchema& schema, std::string_view word);

// Upper bound on realized caption length for this schema.
std::size_t max_caption_length(const AttributeSchema& schema);

}  // namespace rg::world
