#include "refgame/nnkit/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace rg::nn {

void init_uniform(Tensor& t, double bound, Rng& rng) {
  for (double& x : t.v) x = rng.uniform(-bound, bound);
}

Dense Dense::create(ParamStore& store, const std::string& prefix, std::uint32_t in,
                    std::uint32_t out, Rng& rng) {
  Dense d;
  d.in = in;
  d.out = out;
  d.w = &store.add(prefix + ".w", {out, in});
  d.b = &store.add(prefix + ".b", {out});
  init_uniform(*d.w, 1.0 / std::sqrt(static_cast<double>(in)), rng);
  return d;
}

Tape::Id Dense::apply(Tape& tape, Tape::Id x) const {
  return tape.add(tape.matvec(tape.param(*w), x), tape.param(*b));
}

Embedding Embedding::create(ParamStore& store, const std::string& prefix, std::uint32_t vocab,
                            std::uint32_t dim, Rng& rng) {
  Embedding e;
  e.vocab = vocab;
  e.dim = dim;
  e.table = &store.add(prefix + ".table", {vocab, dim});
  init_uniform(*e.table, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
  return e;
}

Tape::Id Embedding::row(Tape& tape, std::uint32_t token) const {
  if (token >= vocab) throw std::invalid_argument("embedding: token id out of range");
  const std::size_t off = static_cast<std::size_t>(token) * dim;
  return tape.param_view(table->v.data() + off, table->g.data() + off, dim);
}

GruCell GruCell::create(ParamStore& store, const std::string& prefix, std::uint32_t in,
                        std::uint32_t hidden, Rng& rng) {
  GruCell c;
  c.in = in;
  c.hidden = hidden;
  const double bi = 1.0 / std::sqrt(static_cast<double>(in));
  const double bh = 1.0 / std::sqrt(static_cast<double>(hidden));
  auto weight = [&](const char* name, std::uint32_t r, std::uint32_t cdim, double bound) {
    Tensor& t = store.add(prefix + "." + name, {r, cdim});
    init_uniform(t, bound, rng);
    return &t;
  };
  c.wz = weight("wz", hidden, in, bi);
  c.uz = weight("uz", hidden, hidden, bh);
  c.bz = &store.add(prefix + ".bz", {hidden});
  c.wr = weight("wr", hidden, in, bi);
  c.ur = weight("ur", hidden, hidden, bh);
  c.br = &store.add(prefix + ".br", {hidden});
  c.wn = weight("wn", hidden, in, bi);
  c.un = weight("un", hidden, hidden, bh);
  c.bn = &store.add(prefix + ".bn", {hidden});
  return c;
}

Tape::Id GruCell::step(Tape& tape, Tape::Id h, Tape::Id x) const {
  const Tape::Id z = tape.sigmoid(
      tape.add(tape.add(tape.matvec(tape.param(*wz), x), tape.matvec(tape.param(*uz), h)),
               tape.param(*bz)));
  const Tape::Id r = tape.sigmoid(
      tape.add(tape.add(tape.matvec(tape.param(*wr), x), tape.matvec(tape.param(*ur), h)),
               tape.param(*br)));
  const Tape::Id n = tape.tanh(
      tape.add(tape.add(tape.matvec(tape.param(*wn), x),
                        tape.mul(r, tape.matvec(tape.param(*un), h))),
               tape.param(*bn)));
  return tape.add(tape.mul(tape.affine(z, -1.0, 1.0), h), tape.mul(z, n));
}

}  // namespace rg::nn
