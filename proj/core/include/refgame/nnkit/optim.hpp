#pragma once

#include <cstdint>

#include "refgame/nnkit/tensor.hpp"

namespace rg::nn {

enum class OptimRule { kAdam, kSgd };

struct OptimConfig {
  OptimRule rule = OptimRule::kAdam;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adaptive-moment (default) or plain SGD updates over a ParamStore. Holds
// per-parameter first/second moment accumulators mirroring the parameter
// shapes. step() applies the update and zeroes the gradients.
class Optimizer {
 public:
  Optimizer(ParamStore& params, OptimConfig cfg);

  void step();

  std::uint64_t step_count() const { return step_count_; }
  void set_step_count(std::uint64_t t) { step_count_ = t; }
  const OptimConfig& config() const { return cfg_; }
  void set_lr(double lr) { cfg_.lr = lr; }

  // Moment accumulators, exposed for checkpointing. Names mirror the
  // parameter names with "m."/"v." prefixes.
  ParamStore& moments() { return moments_; }
  const ParamStore& moments() const { return moments_; }

 private:
  ParamStore* params_;
  ParamStore moments_;
  OptimConfig cfg_;
  std::uint64_t step_count_ = 0;
};

}  // namespace rg::nn
