#include "refgame/nnkit/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace rg::nn {

Optimizer::Optimizer(ParamStore& params, OptimConfig cfg) : params_(&params), cfg_(cfg) {
  for (const auto& [name, t] : params.items()) {
    moments_.add("m." + name, t.shape);
    moments_.add("v." + name, t.shape);
  }
}

void Optimizer::step() {
  ++step_count_;
  const double t = static_cast<double>(step_count_);
  const double bc1 = 1.0 - std::pow(cfg_.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg_.beta2, t);

  for (auto& [name, p] : params_->items()) {
    if (cfg_.rule == OptimRule::kSgd) {
      for (std::size_t i = 0; i < p.size(); ++i) p.v[i] -= cfg_.lr * p.g[i];
    } else {
      Tensor& m = moments_.at("m." + name);
      Tensor& v = moments_.at("v." + name);
      if (m.size() != p.size() || v.size() != p.size()) {
        throw std::logic_error("optimizer: moment/parameter shape mismatch for " + name);
      }
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double g = p.g[i];
        m.v[i] = cfg_.beta1 * m.v[i] + (1.0 - cfg_.beta1) * g;
        v.v[i] = cfg_.beta2 * v.v[i] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m.v[i] / bc1;
        const double vhat = v.v[i] / bc2;
        p.v[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
    for (double& g : p.g) g = 0.0;
  }
}

}  // namespace rg::nn
