#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rg::nn {

// Dense value buffer with a mirrored gradient buffer of identical extent.
struct Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<double> v;  // values
  std::vector<double> g;  // gradient

  std::size_t size() const { return v.size(); }
  std::uint32_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::uint32_t cols() const { return shape.size() > 1 ? shape[1] : 1; }
};

inline std::size_t shape_size(const std::vector<std::uint32_t>& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

// Named trainable tensors. Iteration follows insertion order so that
// optimizer sweeps, checkpoints, and gradient checks are reproducible.
// Tensor addresses are stable for the lifetime of the store (std::deque).
class ParamStore {
 public:
  Tensor& add(const std::string& name, std::vector<std::uint32_t> shape) {
    if (index_.count(name) != 0) {
      throw std::invalid_argument("duplicate parameter name: " + name);
    }
    items_.emplace_back(name, Tensor{});
    Tensor& t = items_.back().second;
    t.shape = std::move(shape);
    t.v.assign(shape_size(t.shape), 0.0);
    t.g.assign(t.v.size(), 0.0);
    index_.emplace(items_.back().first, items_.size() - 1);
    return t;
  }

  Tensor& at(std::string_view name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + std::string(name));
    return items_[it->second].second;
  }
  const Tensor& at(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + std::string(name));
    return items_[it->second].second;
  }
  bool contains(std::string_view name) const { return index_.count(name) != 0; }

  std::deque<std::pair<std::string, Tensor>>& items() { return items_; }
  const std::deque<std::pair<std::string, Tensor>>& items() const { return items_; }

  std::size_t tensor_count() const { return items_.size(); }

  // Total number of scalar parameters.
  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : items_) n += t.size();
    return n;
  }

  void zero_grad() {
    for (auto& [name, t] : items_) std::fill(t.g.begin(), t.g.end(), 0.0);
  }

  bool values_finite() const {
    for (const auto& [name, t] : items_) {
      for (double x : t.v) {
        if (!std::isfinite(x)) return false;
      }
    }
    return true;
  }

  bool grads_finite() const {
    for (const auto& [name, t] : items_) {
      for (double x : t.g) {
        if (!std::isfinite(x)) return false;
      }
    }
    return true;
  }

  // Rounds every value to the nearest float. Called before checkpointing so
  // that in-memory state equals the state a resumed run would load; values at
  // rest are 32-bit.
  void snap_to_f32() {
    for (auto& [name, t] : items_) {
      for (double& x : t.v) x = static_cast<double>(static_cast<float>(x));
    }
  }

  // Copies values (not grads) from a structurally identical store.
  void copy_values_from(const ParamStore& other) {
    if (other.items_.size() != items_.size()) {
      throw std::logic_error("ParamStore structure mismatch");
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (other.items_[i].first != items_[i].first ||
          other.items_[i].second.size() != items_[i].second.size()) {
        throw std::logic_error("ParamStore structure mismatch");
      }
      items_[i].second.v = other.items_[i].second.v;
    }
  }

 private:
  std::deque<std::pair<std::string, Tensor>> items_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace rg::nn
