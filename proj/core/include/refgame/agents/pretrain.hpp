#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "refgame/agents/listener.hpp"
#include "refgame/nnkit/optim.hpp"
#include "refgame/world/types.hpp"

namespace rg::agents {

struct PretrainConfig {
  std::uint32_t n_candidates = 5;
  std::uint32_t steps = 4000;
  std::uint32_t batch = 32;
  nn::OptimConfig optim{.lr = 1e-3};
  std::uint32_t eval_interval = 250;
  std::uint32_t eval_games = 500;
  std::uint64_t seed = 1;
};

struct PretrainResult {
  std::vector<std::pair<std::uint64_t, double>> accuracy_curve;  // (step, val accuracy)
  std::vector<double> loss_curve;                                // mean loss per step
  double final_val_accuracy = 0.0;
};

// Maximizes mean log P(target | gold caption, candidates) over uniformly
// sampled candidate sets. On divergence (non-finite loss) the last good
// parameters are restored and rg::TrainingError is thrown.
PretrainResult pretrain_listener(ListenerNet& listener, const world::DatasetSplit& dataset,
                                 const PretrainConfig& cfg);

// Fraction of gold-caption games whose argmax candidate is the target.
double gold_caption_accuracy(ListenerNet& listener, std::span<const world::DatasetItem> items,
                             std::uint32_t n_candidates, std::uint32_t games, std::uint64_t seed);

}  // namespace rg::agents
