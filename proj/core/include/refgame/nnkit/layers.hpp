#pragma once

#include <cstdint>
#include <string>

#include "refgame/nnkit/rng.hpp"
#include "refgame/nnkit/tape.hpp"
#include "refgame/nnkit/tensor.hpp"

namespace rg::nn {

// Layers are thin views over tensors owned by a ParamStore. Weights are
// initialized uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases at zero.

struct Dense {
  Tensor* w = nullptr;  // [out, in]
  Tensor* b = nullptr;  // [out]
  std::uint32_t in = 0, out = 0;

  static Dense create(ParamStore& store, const std::string& prefix, std::uint32_t in,
                      std::uint32_t out, Rng& rng);

  Tape::Id apply(Tape& tape, Tape::Id x) const;
};

struct Embedding {
  Tensor* table = nullptr;  // [vocab, dim]
  std::uint32_t vocab = 0, dim = 0;

  static Embedding create(ParamStore& store, const std::string& prefix, std::uint32_t vocab,
                          std::uint32_t dim, Rng& rng);

  // Row lookup as a tape leaf; the gradient scatters into the table row.
  Tape::Id row(Tape& tape, std::uint32_t token) const;
};

// Gated recurrent cell. Exact gate equations (pinned by the gradient-check
// suite):
//
//   z = sigmoid(Wz x + Uz h + bz)          update gate
//   r = sigmoid(Wr x + Ur h + br)          reset gate
//   n = tanh(Wn x + r * (Un h) + bn)       candidate state
//   h' = (1 - z) * h + z * n
//
// z -> 0 keeps the previous state, z -> 1 replaces it with the candidate.
struct GruCell {
  Tensor *wz = nullptr, *uz = nullptr, *bz = nullptr;
  Tensor *wr = nullptr, *ur = nullptr, *br = nullptr;
  Tensor *wn = nullptr, *un = nullptr, *bn = nullptr;
  std::uint32_t in = 0, hidden = 0;

  static GruCell create(ParamStore& store, const std::string& prefix, std::uint32_t in,
                        std::uint32_t hidden, Rng& rng);

  Tape::Id step(Tape& tape, Tape::Id h, Tape::Id x) const;
};

void init_uniform(Tensor& t, double bound, Rng& rng);

}  // namespace rg::nn
