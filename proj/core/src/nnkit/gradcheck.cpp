#include "refgame/nnkit/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace rg::nn {

GradCheckReport grad_check(ParamStore& params,
                           const std::function<Tape::Id(Tape&)>& build_loss,
                           double tolerance, double fd_step,
                           const std::function<void(ParamStore&)>& corrupt) {
  Tape tape;
  params.zero_grad();
  tape.backward(build_loss(tape));
  if (corrupt) corrupt(params);

  // Snapshot analytic gradients before finite differences start mutating
  // parameter values.
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.tensor_count());
  for (const auto& [name, t] : params.items()) analytic.push_back(t.g);

  auto eval = [&]() {
    tape.reset();
    return tape.scalar(build_loss(tape));
  };

  GradCheckReport report;
  std::size_t ti = 0;
  for (auto& [name, t] : params.items()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double orig = t.v[i];
      t.v[i] = orig + fd_step;
      const double fp = eval();
      t.v[i] = orig - fd_step;
      const double fm = eval();
      t.v[i] = orig;
      const double numeric = (fp - fm) / (2.0 * fd_step);
      const double an = analytic[ti][i];
      const double denom = std::max({std::fabs(numeric), std::fabs(an), 1e-6});
      const double rel = std::fabs(numeric - an) / denom;
      report.max_rel_err = std::max(report.max_rel_err, rel);
      if (rel > tolerance) {
        report.flagged.push_back({name, i, an, numeric, rel});
      }
    }
    ++ti;
  }
  params.zero_grad();
  return report;
}

}  // namespace rg::nn
