#include "refgame/distractors/index.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "refgame/errors.hpp"

namespace rg::distractors {

using nlohmann::json;

const std::vector<std::pair<std::uint32_t, float>>& SimilarityIndex::neighbors(
    std::uint64_t item_id) const {
  auto it = lists.find(item_id);
  if (it == lists.end()) {
    throw StaleArtifactError("index: no neighbor list for item " + std::to_string(item_id));
  }
  return it->second;
}

SimilarityIndex build_index(std::span<const world::DatasetItem* const> items,
                            const SimilarityMetric& metric, std::uint32_t k,
                            std::uint32_t vocab_size, std::uint64_t fingerprint) {
  if (k >= items.size()) throw ConfigError("build_index: K must be smaller than the dataset");
  const PairwiseScorer scorer(metric, items, vocab_size);

  SimilarityIndex index;
  index.metric_descriptor = metric.descriptor();
  index.k = k;
  index.fingerprint = fingerprint;

  struct Scored {
    double score;
    std::uint32_t pos;
  };
  std::vector<Scored> scored;
  for (std::size_t i = 0; i < items.size(); ++i) {
    scored.clear();
    scored.reserve(items.size() - 1);
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (j == i) continue;
      scored.push_back({scorer.score(i, j), static_cast<std::uint32_t>(j)});
    }
    const auto better = [&](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return items[a.pos]->scene.id < items[b.pos]->scene.id;
    };
    std::partial_sort(scored.begin(), scored.begin() + k, scored.end(), better);
    std::vector<std::pair<std::uint32_t, float>> list;
    list.reserve(k);
    for (std::uint32_t r = 0; r < k; ++r) {
      list.emplace_back(static_cast<std::uint32_t>(items[scored[r].pos]->scene.id),
                        static_cast<float>(scored[r].score));
    }
    index.lists.emplace(items[i]->scene.id, std::move(list));
  }
  return index;
}

namespace {

void write_u32(std::ostream& os, std::uint32_t x) {
  os.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

std::uint32_t read_u32(std::istream& is) {
  std::uint32_t x = 0;
  is.read(reinterpret_cast<char*>(&x), sizeof(x));
  if (!is) throw StaleArtifactError("index: truncated file");
  return x;
}

}  // namespace

void save_index(const SimilarityIndex& index, const std::string& path) {
  json header;
  header["metric"] = json::parse(index.metric_descriptor);
  header["k"] = index.k;
  header["fingerprint"] = index.fingerprint;
  header["n_items"] = index.lists.size();
  const std::string hdr = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("index: cannot open " + tmp + " for writing");
    write_u32(os, static_cast<std::uint32_t>(hdr.size()));
    os.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));

    // Deterministic record order: ascending item id.
    std::vector<std::uint64_t> ids;
    ids.reserve(index.lists.size());
    for (const auto& [id, list] : index.lists) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (std::uint64_t id : ids) {
      write_u32(os, static_cast<std::uint32_t>(id));
      for (const auto& [nid, score] : index.lists.at(id)) {
        write_u32(os, nid);
        os.write(reinterpret_cast<const char*>(&score), sizeof(score));
      }
    }
    if (!os) throw ConfigError("index: write failure on " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("index: cannot move " + tmp + " into place");
  }
}

SimilarityIndex load_index(const std::string& path, std::uint64_t expected_fingerprint) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("index: cannot open " + path);
  const std::uint32_t hdr_len = read_u32(is);
  if (hdr_len > (1u << 24)) throw StaleArtifactError("index: implausible header length");
  std::string hdr(hdr_len, '\0');
  is.read(hdr.data(), hdr_len);
  if (!is) throw StaleArtifactError("index: truncated header");

  json header;
  try {
    header = json::parse(hdr);
  } catch (const json::exception& e) {
    throw StaleArtifactError(std::string("index: bad header JSON: ") + e.what());
  }
  SimilarityIndex index;
  index.metric_descriptor = header.at("metric").dump();
  index.k = header.at("k").get<std::uint32_t>();
  index.fingerprint = header.at("fingerprint").get<std::uint64_t>();
  const auto n_items = header.at("n_items").get<std::uint64_t>();

  if (expected_fingerprint != 0 && index.fingerprint != expected_fingerprint) {
    throw StaleArtifactError("index: fingerprint mismatch; rebuild against the current corpus");
  }

  for (std::uint64_t r = 0; r < n_items; ++r) {
    const std::uint32_t id = read_u32(is);
    std::vector<std::pair<std::uint32_t, float>> list;
    list.reserve(index.k);
    for (std::uint32_t e = 0; e < index.k; ++e) {
      const std::uint32_t nid = read_u32(is);
      float score = 0.0f;
      is.read(reinterpret_cast<char*>(&score), sizeof(score));
      if (!is) throw StaleArtifactError("index: truncated records");
      list.emplace_back(nid, score);
    }
    index.lists.emplace(id, std::move(list));
  }
  return index;
}

GamePool GamePool::from(std::span<const world::DatasetItem> items) {
  GamePool pool;
  pool.items.reserve(items.size());
  for (const auto& it : items) {
    pool.by_id.emplace(it.scene.id, static_cast<std::uint32_t>(pool.items.size()));
    pool.items.push_back(&it);
  }
  return pool;
}

GameSample sample_game(const GamePool& pool, const SimilarityIndex* index,
                       std::uint32_t n_distractors, GameMode mode, Rng& rng,
                       bool rank_weighted) {
  const auto n = static_cast<std::uint32_t>(pool.items.size());
  if (n < n_distractors + 1) throw ConfigError("sample_game: pool smaller than candidate set");
  const std::uint32_t target_pos = rng.below(n);
  const world::DatasetItem* target = pool.items[target_pos];

  std::vector<const world::DatasetItem*> picked = {target};
  if (mode == GameMode::kEasy) {
    std::vector<std::uint32_t> chosen = {target_pos};
    while (picked.size() < n_distractors + 1u) {
      const std::uint32_t d = rng.below(n);
      bool dup = false;
      for (std::uint32_t c : chosen) dup = dup || (c == d);
      if (!dup) {
        chosen.push_back(d);
        picked.push_back(pool.items[d]);
      }
    }
  } else {
    if (index == nullptr) throw ConfigError("sample_game: HARD mode requires an index");
    const auto& list = index->neighbors(target->scene.id);
    if (list.size() < n_distractors) {
      throw ConfigError("sample_game: top-K list shorter than the distractor count");
    }
    std::vector<std::uint32_t> ranks;
    while (ranks.size() < n_distractors) {
      std::uint32_t r;
      if (rank_weighted) {
        // Linearly decaying rank weights: P(rank r) ~ (K - r).
        const std::uint64_t total =
            static_cast<std::uint64_t>(list.size()) * (list.size() + 1) / 2;
        std::uint64_t u = static_cast<std::uint64_t>(rng.uniform() * static_cast<double>(total));
        r = 0;
        std::uint64_t acc = 0;
        for (std::uint32_t i = 0; i < list.size(); ++i) {
          acc += list.size() - i;
          if (u < acc) {
            r = i;
            break;
          }
        }
      } else {
        r = rng.below(static_cast<std::uint32_t>(list.size()));
      }
      bool dup = false;
      for (std::uint32_t x : ranks) dup = dup || (x == r);
      if (!dup) ranks.push_back(r);
    }
    for (std::uint32_t r : ranks) {
      const auto it = pool.by_id.find(list[r].first);
      if (it == pool.by_id.end()) {
        throw StaleArtifactError("sample_game: index references an item outside this split");
      }
      picked.push_back(pool.items[it->second]);
    }
  }

  GameSample game;
  std::vector<std::uint32_t> order(picked.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  game.candidates.reserve(picked.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    game.candidates.push_back(picked[order[i]]);
    if (order[i] == 0) game.target_index = i;
  }
  return game;
}

}  // namespace rg::distractors
