#pragma once

#include <string>

#include "refgame/world/types.hpp"
#include "refgame/world/world.hpp"

namespace rg::world {

// Corpus file: one JSON object per line, each carrying the scene layout, the
// rendered feature vector, the caption (token ids + POS tags), and the split
// label. Vocabulary file: one token per line, line number = id.

void save_corpus(const Dataset& ds, const std::string& path);
void save_vocab(const Vocabulary& vocab, const std::string& path);

// Tags are reconstructed from the schema's grammar terminals.
Vocabulary load_vocab(const std::string& path, const AttributeSchema& schema);

DatasetSplit load_corpus(const std::string& path);

}  // namespace rg::world
