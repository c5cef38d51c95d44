#pragma once

#include <functional>
#include <string>
#include <vector>

#include "refgame/nnkit/tape.hpp"
#include "refgame/nnkit/tensor.hpp"

namespace rg::nn {

struct GradCheckEntry {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::vector<GradCheckEntry> flagged;  // entries with rel_err > tolerance
  bool ok(double tolerance) const { return max_rel_err <= tolerance; }
};

// Compares tape gradients against central finite differences, parameter
// scalar by parameter scalar. build_loss must rebuild the same deterministic
// forward pass each call (no RNG inside). Intended for models of at most a
// few thousand parameters.
//
// corrupt, when set, runs after backward and may perturb the analytic
// gradients; used by tests to verify that injected faults are flagged.
GradCheckReport grad_check(ParamStore& params,
                           const std::function<Tape::Id(Tape&)>& build_loss,
                           double tolerance, double fd_step = 1e-4,
                           const std::function<void(ParamStore&)>& corrupt = nullptr);

}  // namespace rg::nn
