#include "refgame/world/corpus_io.hpp"

#include <fstream>

#include <json.hpp>

#include "refgame/errors.hpp"
#include "refgame/world/grammar.hpp"

namespace rg::world {

using nlohmann::json;

void save_corpus(const Dataset& ds, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("corpus: cannot open " + path + " for writing");
  std::vector<const char*> labels;
  const auto items = items_by_id(ds.split, &labels);
  for (std::size_t k = 0; k < items.size(); ++k) {
    const DatasetItem& it = *items[k];
    json scene;
    scene["objects"] = json::array();
    for (const auto& o : it.scene.objects) {
      scene["objects"].push_back({o.shape, o.color, o.size});
    }
    scene["relations"] = json::array();
    for (const auto& r : it.scene.relations) {
      scene["relations"].push_back({r.relation, r.a, r.b});
    }
    json line;
    line["id"] = it.scene.id;
    line["split"] = labels[k];
    line["scene"] = scene;
    line["features"] = it.image.features;
    line["tokens"] = it.caption.tokens;
    json tags = json::array();
    for (PosTag t : it.caption.tags) tags.push_back(std::string(to_string(t)));
    line["tags"] = tags;
    os << line.dump() << "\n";
  }
  if (!os) throw ConfigError("corpus: write failure on " + path);
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("vocab: cannot open " + path + " for writing");
  for (std::uint32_t i = 0; i < vocab.size(); ++i) os << vocab.token(i) << "\n";
  if (!os) throw ConfigError("vocab: write failure on " + path);
}

Vocabulary load_vocab(const std::string& path, const AttributeSchema& schema) {
  std::ifstream is(path);
  if (!is) throw ConfigError("vocab: cannot open " + path);
  Vocabulary vocab;
  std::string line;
  std::uint32_t i = 0;
  while (std::getline(is, line)) {
    if (i < Vocabulary::kReservedCount) {
      if (line != vocab.token(i)) throw ConfigError("vocab: reserved token mismatch in " + path);
    } else {
      vocab.add(line, tag_of(schema, line));
    }
    ++i;
  }
  if (i < Vocabulary::kReservedCount) throw ConfigError("vocab: file too short: " + path);
  return vocab;
}

DatasetSplit load_corpus(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("corpus: cannot open " + path);
  DatasetSplit split;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("corpus: bad JSON on line " + std::to_string(lineno) + ": " + e.what());
    }
    DatasetItem it;
    it.scene.id = j.at("id").get<std::uint64_t>();
    for (const auto& o : j.at("scene").at("objects")) {
      it.scene.objects.push_back({o.at(0).get<std::uint32_t>(), o.at(1).get<std::uint32_t>(),
                                  o.at(2).get<std::uint32_t>()});
    }
    for (const auto& r : j.at("scene").at("relations")) {
      it.scene.relations.push_back({r.at(0).get<std::uint32_t>(), r.at(1).get<std::uint32_t>(),
                                    r.at(2).get<std::uint32_t>()});
    }
    it.image.features = j.at("features").get<std::vector<double>>();
    it.caption.tokens = j.at("tokens").get<std::vector<std::uint32_t>>();
    for (const auto& t : j.at("tags")) {
      const auto tag = pos_tag_from_string(t.get<std::string>());
      if (!tag) throw ConfigError("corpus: unknown POS tag on line " + std::to_string(lineno));
      it.caption.tags.push_back(*tag);
    }
    const std::string s = j.at("split").get<std::string>();
    if (s == "train") {
      split.train.push_back(std::move(it));
    } else if (s == "val") {
      split.val.push_back(std::move(it));
    } else if (s == "test") {
      split.test.push_back(std::move(it));
    } else {
      throw ConfigError("corpus: unknown split label on line " + std::to_string(lineno));
    }
  }
  if (split.total() == 0) throw ConfigError("corpus: no items in " + path);
  return split;
}

}  // namespace rg::world
