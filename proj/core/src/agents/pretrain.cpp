#include "refgame/agents/pretrain.hpp"

#include <cmath>
#include <stdexcept>

#include "refgame/errors.hpp"
#include "refgame/nnkit/mathutil.hpp"
#include "refgame/nnkit/tape.hpp"

namespace rg::agents {

namespace {

constexpr std::uint64_t kGameStream = 0x9a3e;
constexpr std::uint64_t kEvalStream = 0xe7a1;

// Target plus n-1 distinct uniform distractors.
void sample_uniform_game(std::span<const world::DatasetItem> items, std::uint32_t n_candidates,
                         Rng& rng, std::uint32_t* target_index,
                         std::vector<const world::DatasetItem*>* candidates) {
  const auto n = static_cast<std::uint32_t>(items.size());
  if (n < n_candidates) throw std::invalid_argument("pretrain: split smaller than candidate set");
  const std::uint32_t target_item = rng.below(n);
  std::vector<std::uint32_t> picked = {target_item};
  while (picked.size() < n_candidates) {
    const std::uint32_t d = rng.below(n);
    bool dup = false;
    for (std::uint32_t p : picked) dup = dup || (p == d);
    if (!dup) picked.push_back(d);
  }
  rng.shuffle(picked);
  candidates->clear();
  for (std::uint32_t p : picked) candidates->push_back(&items[p]);
  for (std::uint32_t j = 0; j < n_candidates; ++j) {
    if (picked[j] == target_item) *target_index = j;
  }
}

}  // namespace

double gold_caption_accuracy(ListenerNet& listener, std::span<const world::DatasetItem> items,
                             std::uint32_t n_candidates, std::uint32_t games, std::uint64_t seed) {
  if (games == 0) throw std::invalid_argument("gold_caption_accuracy: need games > 0");
  nn::Tape tape;
  std::uint32_t correct = 0;
  std::vector<const world::DatasetItem*> cand;
  std::vector<const double*> feats;
  for (std::uint32_t g = 0; g < games; ++g) {
    Rng rng(derive_seed(seed, kEvalStream, g));
    std::uint32_t target = 0;
    sample_uniform_game(items, n_candidates, rng, &target, &cand);
    feats.clear();
    for (const auto* c : cand) feats.push_back(c->image.features.data());
    tape.reset();
    const auto probs = listener.probs(tape, cand[target]->caption.tokens, feats);
    if (nn::argmax(probs) == target) ++correct;
  }
  return static_cast<double>(correct) / games;
}

PretrainResult pretrain_listener(ListenerNet& listener, const world::DatasetSplit& dataset,
                                 const PretrainConfig& cfg) {
  if (dataset.train.empty()) throw std::invalid_argument("pretrain: empty training split");
  PretrainResult result;
  nn::Optimizer opt(listener.params(), cfg.optim);
  nn::Tape tape;

  // Last-good snapshot for the divergence error path.
  std::vector<std::vector<double>> last_good;
  auto snapshot = [&]() {
    last_good.clear();
    for (const auto& [name, t] : listener.params().items()) last_good.push_back(t.v);
  };
  auto restore = [&]() {
    std::size_t i = 0;
    for (auto& [name, t] : listener.params().items()) t.v = last_good[i++];
  };
  snapshot();

  std::vector<const world::DatasetItem*> cand;
  std::vector<const double*> feats;
  const auto eval_acc = [&](std::uint64_t step) {
    const double acc =
        dataset.val.empty()
            ? 0.0
            : gold_caption_accuracy(listener, dataset.val, cfg.n_candidates,
                                    cfg.eval_games, derive_seed(cfg.seed, step));
    result.accuracy_curve.emplace_back(step, acc);
    return acc;
  };

  eval_acc(0);
  for (std::uint32_t step = 1; step <= cfg.steps; ++step) {
    tape.reset();
    std::vector<nn::Tape::Id> losses;
    losses.reserve(cfg.batch);
    Rng rng(derive_seed(cfg.seed, kGameStream, step));
    for (std::uint32_t b = 0; b < cfg.batch; ++b) {
      std::uint32_t target = 0;
      sample_uniform_game(dataset.train, cfg.n_candidates, rng, &target, &cand);
      feats.clear();
      for (const auto* c : cand) feats.push_back(c->image.features.data());
      losses.push_back(
          listener.game_loss(tape, cand[target]->caption.tokens, feats, target));
    }
    const nn::Tape::Id loss =
        tape.affine(tape.sum(tape.pack(losses)), 1.0 / cfg.batch, 0.0);
    const double loss_value = tape.scalar(loss);
    if (!std::isfinite(loss_value)) {
      restore();
      throw TrainingError("pretrain: loss diverged at step " + std::to_string(step));
    }
    result.loss_curve.push_back(loss_value);
    tape.backward(loss);
    if (!listener.params().grads_finite()) {
      restore();
      throw TrainingError("pretrain: non-finite gradients at step " + std::to_string(step));
    }
    opt.step();
    snapshot();
    if (cfg.eval_interval > 0 && step % cfg.eval_interval == 0) eval_acc(step);
  }
  result.final_val_accuracy =
      result.accuracy_curve.empty() ? 0.0 : result.accuracy_curve.back().second;
  return result;
}

}  // namespace rg::agents
