#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "refgame/distractors/similarity.hpp"
#include "refgame/nnkit/rng.hpp"
#include "refgame/world/types.hpp"

namespace rg::distractors {

// Exact top-K neighbor lists under one metric. Scores are non-increasing
// inside each list, self-neighbors are excluded, and score ties order by
// lower id. Lists key on global item ids; neighbors stay within the item
// population the index was built from (one dataset split).
struct SimilarityIndex {
  std::string metric_descriptor;  // metric JSON
  std::uint32_t k = 0;
  std::uint64_t fingerprint = 0;  // corpus file hash
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, float>>> lists;

  const std::vector<std::pair<std::uint32_t, float>>& neighbors(std::uint64_t item_id) const;
};

SimilarityIndex build_index(std::span<const world::DatasetItem* const> items,
                            const SimilarityMetric& metric, std::uint32_t k,
                            std::uint32_t vocab_size, std::uint64_t fingerprint);

// File layout: u32 header length, header JSON (metric descriptor, k,
// fingerprint, item count), then per item: u32 item id + k * (u32 id,
// f32 score).
void save_index(const SimilarityIndex& index, const std::string& path);

// expected_fingerprint, when nonzero, is checked against the stored one;
// mismatch throws rg::StaleArtifactError.
SimilarityIndex load_index(const std::string& path, std::uint64_t expected_fingerprint);

// One split of the dataset plus an id lookup, the population games draw from.
struct GamePool {
  std::vector<const world::DatasetItem*> items;
  std::unordered_map<std::uint64_t, std::uint32_t> by_id;

  static GamePool from(std::span<const world::DatasetItem> items);
};

enum class GameMode : std::uint8_t { kEasy, kHard };

struct GameSample {
  std::uint32_t target_index = 0;
  std::vector<const world::DatasetItem*> candidates;

  const world::DatasetItem& target() const { return *candidates[target_index]; }
};

// EASY: distractors uniform without replacement, target excluded.
// HARD: distractors uniform without replacement from the target's top-K list
// (rank_weighted biases linearly toward earlier ranks). Candidate order is
// shuffled, so the target position is uniform.
GameSample sample_game(const GamePool& pool, const SimilarityIndex* index,
                       std::uint32_t n_distractors, GameMode mode, Rng& rng,
                       bool rank_weighted = false);

}  // namespace rg::distractors
