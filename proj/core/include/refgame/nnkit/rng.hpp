#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace rg {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdull;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ull;
  z ^= z >> 33;
  return z;
}

// Hash-combine words into a seed for a derived stream. Every independent
// random stream in the project is derived from (base seed, purpose tags),
// never by splitting a live generator, so runs replay exactly from a step
// number.
inline std::uint64_t derive_seed(std::uint64_t a) { return mix64(a + 0x9e3779b97f4a7c15ull); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return derive_seed(mix64(a + 0x9e3779b97f4a7c15ull) ^ b, rest...);
}

// Deterministic 64-bit PRNG (splitmix64). One word of state, trivially
// serializable. std:: distributions are avoided everywhere because their
// output sequences are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Requires n > 0.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller. No cached spare value.
  double gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(static_cast<std::uint32_t>(i))]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace rg
