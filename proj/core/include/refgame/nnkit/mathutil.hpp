#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace rg::nn {

// Probabilities are floored at this value before any log; keeps degenerate
// distributions out of -inf territory.
inline constexpr double kProbFloor = 1e-12;

// Stable softmax (max subtraction). Throws on empty input.
inline std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  double m = logits[0];
  for (double x : logits) m = std::max(m, x);
  std::vector<double> out(logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& x : out) x /= s;
  return out;
}

inline std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("log_softmax: empty input");
  double m = logits[0];
  for (double x : logits) m = std::max(m, x);
  double s = 0.0;
  for (double x : logits) s += std::exp(x - m);
  const double lse = m + std::log(s);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

// -log probs[target], with the probability floored at kProbFloor.
inline double cross_entropy(std::span<const double> probs, std::size_t target) {
  if (target >= probs.size()) throw std::invalid_argument("cross_entropy: target out of range");
  return -std::log(std::max(probs[target], kProbFloor));
}

// Index of the largest value; ties break toward the lowest index.
inline std::size_t argmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace rg::nn
