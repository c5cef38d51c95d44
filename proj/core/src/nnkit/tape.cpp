#include "refgame/nnkit/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace rg::nn {

double* Tape::Arena::alloc(std::size_t n) {
  if (n == 0) n = 1;
  if (n > kBlock) {
    // Oversized request: dedicated block, never revisited by the cursor.
    blocks_.emplace_back(new double[n]);
    block_sizes_.push_back(0);  // capacity 0 => cursor skips it
    return blocks_.back().get();
  }
  while (true) {
    if (cur_ == blocks_.size()) {
      blocks_.emplace_back(new double[kBlock]);
      block_sizes_.push_back(kBlock);
    }
    if (off_ + n <= block_sizes_[cur_]) {
      double* p = blocks_[cur_].get() + off_;
      off_ += n;
      return p;
    }
    ++cur_;
    off_ = 0;
  }
}

void Tape::Arena::reset() {
  cur_ = 0;
  off_ = 0;
}

Tape::Id Tape::push(Node nd) {
  nodes_.push_back(nd);
  return static_cast<Id>(nodes_.size() - 1);
}

void Tape::alloc_out(Node& nd, std::uint32_t n) {
  nd.n = n;
  double* v = values_.alloc(n);
  nd.v = v;
  nd.g = grads_.alloc(n);
  std::fill_n(nd.g, n, 0.0);
}

double* Tape::mutable_values(Id id) {
  return const_cast<double*>(nodes_[id].v);
}

Tape::Id Tape::param(Tensor& t) {
  Node nd;
  nd.op = Op::kParam;
  nd.n = static_cast<std::uint32_t>(t.size());
  nd.rows = t.rows();
  nd.cols = t.cols();
  nd.v = t.v.data();
  nd.g = t.g.data();
  return push(nd);
}

Tape::Id Tape::param_view(const double* v, double* g, std::uint32_t n) {
  Node nd;
  nd.op = Op::kParam;
  nd.n = n;
  nd.rows = n;
  nd.cols = 1;
  nd.v = v;
  nd.g = g;
  return push(nd);
}

Tape::Id Tape::input(const double* v, std::uint32_t n) {
  Node nd;
  nd.op = Op::kInput;
  nd.n = n;
  nd.v = v;
  nd.g = grads_.alloc(n);
  std::fill_n(nd.g, n, 0.0);
  return push(nd);
}

Tape::Id Tape::constant(std::span<const double> v) {
  Node nd;
  nd.op = Op::kConst;
  alloc_out(nd, static_cast<std::uint32_t>(v.size()));
  std::copy(v.begin(), v.end(), const_cast<double*>(nd.v));
  return push(nd);
}

Tape::Id Tape::matvec(Id w, Id x) {
  const Node& wn = nodes_.at(w);
  const Node& xn = nodes_.at(x);
  if (wn.rows == 0 || wn.cols == 0 || wn.rows * wn.cols != wn.n) {
    throw std::invalid_argument("matvec: weight is not rank-2");
  }
  if (xn.n != wn.cols) throw std::invalid_argument("matvec: dimension mismatch");
  Node nd;
  nd.op = Op::kMatVec;
  nd.a = w;
  nd.b = x;
  nd.rows = wn.rows;
  nd.cols = wn.cols;
  alloc_out(nd, wn.rows);
  double* out = const_cast<double*>(nd.v);
  const double* wm = wn.v;
  const double* xv = xn.v;
  for (std::uint32_t i = 0; i < wn.rows; ++i) {
    const double* row = wm + static_cast<std::size_t>(i) * wn.cols;
    double acc = 0.0;
    for (std::uint32_t j = 0; j < wn.cols; ++j) acc += row[j] * xv[j];
    out[i] = acc;
  }
  return push(nd);
}

Tape::Id Tape::add(Id a, Id b) {
  const Node& an = nodes_.at(a);
  const Node& bn = nodes_.at(b);
  if (an.n != bn.n) throw std::invalid_argument("add: length mismatch");
  Node nd;
  nd.op = Op::kAdd;
  nd.a = a;
  nd.b = b;
  alloc_out(nd, an.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < an.n; ++i) out[i] = an.v[i] + bn.v[i];
  return push(nd);
}

Tape::Id Tape::sub(Id a, Id b) {
  const Node& an = nodes_.at(a);
  const Node& bn = nodes_.at(b);
  if (an.n != bn.n) throw std::invalid_argument("sub: length mismatch");
  Node nd;
  nd.op = Op::kSub;
  nd.a = a;
  nd.b = b;
  alloc_out(nd, an.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < an.n; ++i) out[i] = an.v[i] - bn.v[i];
  return push(nd);
}

Tape::Id Tape::mul(Id a, Id b) {
  const Node& an = nodes_.at(a);
  const Node& bn = nodes_.at(b);
  if (an.n != bn.n) throw std::invalid_argument("mul: length mismatch");
  Node nd;
  nd.op = Op::kMul;
  nd.a = a;
  nd.b = b;
  alloc_out(nd, an.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < an.n; ++i) out[i] = an.v[i] * bn.v[i];
  return push(nd);
}

Tape::Id Tape::affine(Id x, double scale, double shift) {
  const Node& xn = nodes_.at(x);
  Node nd;
  nd.op = Op::kAffine;
  nd.a = x;
  nd.c0 = scale;
  nd.c1 = shift;
  alloc_out(nd, xn.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < xn.n; ++i) out[i] = scale * xn.v[i] + shift;
  return push(nd);
}

Tape::Id Tape::sigmoid(Id x) {
  const Node& xn = nodes_.at(x);
  Node nd;
  nd.op = Op::kSigmoid;
  nd.a = x;
  alloc_out(nd, xn.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < xn.n; ++i) out[i] = 1.0 / (1.0 + std::exp(-xn.v[i]));
  return push(nd);
}

Tape::Id Tape::tanh(Id x) {
  const Node& xn = nodes_.at(x);
  Node nd;
  nd.op = Op::kTanh;
  nd.a = x;
  alloc_out(nd, xn.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < xn.n; ++i) out[i] = std::tanh(xn.v[i]);
  return push(nd);
}

Tape::Id Tape::exp(Id x) {
  const Node& xn = nodes_.at(x);
  Node nd;
  nd.op = Op::kExp;
  nd.a = x;
  alloc_out(nd, xn.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < xn.n; ++i) out[i] = std::exp(xn.v[i]);
  return push(nd);
}

Tape::Id Tape::min2(Id a, Id b) {
  const Node& an = nodes_.at(a);
  const Node& bn = nodes_.at(b);
  if (an.n != bn.n) throw std::invalid_argument("min2: length mismatch");
  Node nd;
  nd.op = Op::kMin2;
  nd.a = a;
  nd.b = b;
  alloc_out(nd, an.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < an.n; ++i) out[i] = std::min(an.v[i], bn.v[i]);
  return push(nd);
}

Tape::Id Tape::pack(std::span<const Id> parts) {
  if (parts.empty()) throw std::invalid_argument("pack: empty input");
  std::uint32_t total = 0;
  for (Id p : parts) total += nodes_.at(p).n;
  Node nd;
  nd.op = Op::kPack;
  nd.a = static_cast<Id>(pack_children_.size());
  nd.rows = static_cast<std::uint32_t>(parts.size());
  for (Id p : parts) pack_children_.push_back(p);
  alloc_out(nd, total);
  double* out = const_cast<double*>(nd.v);
  std::uint32_t off = 0;
  for (Id p : parts) {
    const Node& pn = nodes_[p];
    for (std::uint32_t i = 0; i < pn.n; ++i) out[off + i] = pn.v[i];
    off += pn.n;
  }
  return push(nd);
}

Tape::Id Tape::log_softmax(Id x) {
  const Node& xn = nodes_.at(x);
  if (xn.n == 0) throw std::invalid_argument("log_softmax: empty input");
  Node nd;
  nd.op = Op::kLogSoftmax;
  nd.a = x;
  alloc_out(nd, xn.n);
  double* out = const_cast<double*>(nd.v);
  double m = xn.v[0];
  for (std::uint32_t i = 1; i < xn.n; ++i) m = std::max(m, xn.v[i]);
  double s = 0.0;
  for (std::uint32_t i = 0; i < xn.n; ++i) s += std::exp(xn.v[i] - m);
  const double lse = m + std::log(s);
  for (std::uint32_t i = 0; i < xn.n; ++i) out[i] = xn.v[i] - lse;
  return push(nd);
}

Tape::Id Tape::entropy(Id log_probs) {
  const Node& xn = nodes_.at(log_probs);
  Node nd;
  nd.op = Op::kEntropy;
  nd.a = log_probs;
  alloc_out(nd, 1);
  double h = 0.0;
  for (std::uint32_t i = 0; i < xn.n; ++i) h -= std::exp(xn.v[i]) * xn.v[i];
  const_cast<double*>(nd.v)[0] = h;
  return push(nd);
}

Tape::Id Tape::pick(Id x, std::uint32_t index) {
  const Node& xn = nodes_.at(x);
  if (index >= xn.n) throw std::invalid_argument("pick: index out of range");
  Node nd;
  nd.op = Op::kPick;
  nd.a = x;
  nd.cols = index;
  alloc_out(nd, 1);
  const_cast<double*>(nd.v)[0] = xn.v[index];
  return push(nd);
}

Tape::Id Tape::dot(Id a, Id b) {
  const Node& an = nodes_.at(a);
  const Node& bn = nodes_.at(b);
  if (an.n != bn.n) throw std::invalid_argument("dot: length mismatch");
  Node nd;
  nd.op = Op::kDot;
  nd.a = a;
  nd.b = b;
  alloc_out(nd, 1);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < an.n; ++i) acc += an.v[i] * bn.v[i];
  const_cast<double*>(nd.v)[0] = acc;
  return push(nd);
}

Tape::Id Tape::sum(Id x) {
  const Node& xn = nodes_.at(x);
  Node nd;
  nd.op = Op::kSum;
  nd.a = x;
  alloc_out(nd, 1);
  double acc = 0.0;
  for (std::uint32_t i = 0; i < xn.n; ++i) acc += xn.v[i];
  const_cast<double*>(nd.v)[0] = acc;
  return push(nd);
}

Tape::Id Tape::clamp_min(Id x, double floor) {
  const Node& xn = nodes_.at(x);
  Node nd;
  nd.op = Op::kClampMin;
  nd.a = x;
  nd.c0 = floor;
  alloc_out(nd, xn.n);
  double* out = const_cast<double*>(nd.v);
  for (std::uint32_t i = 0; i < xn.n; ++i) out[i] = std::max(xn.v[i], floor);
  return push(nd);
}

std::span<const double> Tape::values(Id id) const {
  const Node& nd = nodes_.at(id);
  return {nd.v, nd.n};
}

double Tape::scalar(Id id) const {
  const Node& nd = nodes_.at(id);
  if (nd.n != 1) throw std::invalid_argument("scalar: node is not scalar");
  return nd.v[0];
}

void Tape::backward(Id loss) {
  if (nodes_.empty()) throw std::logic_error("backward called before any forward pass");
  if (loss >= nodes_.size()) throw std::logic_error("backward: invalid loss id");
  const Node& ln = nodes_[loss];
  if (ln.n != 1) throw std::invalid_argument("backward: loss must be scalar");
  ln.g[0] += 1.0;

  for (Id i = loss + 1; i-- > 0;) {
    const Node& nd = nodes_[i];
    switch (nd.op) {
      case Op::kParam:
      case Op::kInput:
      case Op::kConst:
        break;
      case Op::kMatVec: {
        const Node& wn = nodes_[nd.a];
        const Node& xn = nodes_[nd.b];
        for (std::uint32_t r = 0; r < nd.rows; ++r) {
          const double gr = nd.g[r];
          if (gr == 0.0) continue;
          const double* wrow = wn.v + static_cast<std::size_t>(r) * nd.cols;
          double* gwrow = wn.g + static_cast<std::size_t>(r) * nd.cols;
          for (std::uint32_t c = 0; c < nd.cols; ++c) {
            gwrow[c] += gr * xn.v[c];
            xn.g[c] += gr * wrow[c];
          }
        }
        break;
      }
      case Op::kAdd: {
        const Node& an = nodes_[nd.a];
        const Node& bn = nodes_[nd.b];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          an.g[k] += nd.g[k];
          bn.g[k] += nd.g[k];
        }
        break;
      }
      case Op::kSub: {
        const Node& an = nodes_[nd.a];
        const Node& bn = nodes_[nd.b];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          an.g[k] += nd.g[k];
          bn.g[k] -= nd.g[k];
        }
        break;
      }
      case Op::kMul: {
        const Node& an = nodes_[nd.a];
        const Node& bn = nodes_[nd.b];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          an.g[k] += nd.g[k] * bn.v[k];
          bn.g[k] += nd.g[k] * an.v[k];
        }
        break;
      }
      case Op::kAffine: {
        const Node& an = nodes_[nd.a];
        for (std::uint32_t k = 0; k < nd.n; ++k) an.g[k] += nd.c0 * nd.g[k];
        break;
      }
      case Op::kSigmoid: {
        const Node& an = nodes_[nd.a];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          const double s = nd.v[k];
          an.g[k] += nd.g[k] * s * (1.0 - s);
        }
        break;
      }
      case Op::kTanh: {
        const Node& an = nodes_[nd.a];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          const double t = nd.v[k];
          an.g[k] += nd.g[k] * (1.0 - t * t);
        }
        break;
      }
      case Op::kExp: {
        const Node& an = nodes_[nd.a];
        for (std::uint32_t k = 0; k < nd.n; ++k) an.g[k] += nd.g[k] * nd.v[k];
        break;
      }
      case Op::kMin2: {
        const Node& an = nodes_[nd.a];
        const Node& bn = nodes_[nd.b];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          if (an.v[k] <= bn.v[k]) {
            an.g[k] += nd.g[k];
          } else {
            bn.g[k] += nd.g[k];
          }
        }
        break;
      }
      case Op::kPack: {
        std::uint32_t off = 0;
        for (std::uint32_t c = 0; c < nd.rows; ++c) {
          const Node& cn = nodes_[pack_children_[nd.a + c]];
          for (std::uint32_t k = 0; k < cn.n; ++k) cn.g[k] += nd.g[off + k];
          off += cn.n;
        }
        break;
      }
      case Op::kLogSoftmax: {
        const Node& an = nodes_[nd.a];
        double gsum = 0.0;
        for (std::uint32_t k = 0; k < nd.n; ++k) gsum += nd.g[k];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          an.g[k] += nd.g[k] - std::exp(nd.v[k]) * gsum;
        }
        break;
      }
      case Op::kEntropy: {
        const Node& an = nodes_[nd.a];
        const double g0 = nd.g[0];
        if (g0 != 0.0) {
          for (std::uint32_t k = 0; k < an.n; ++k) {
            an.g[k] -= g0 * std::exp(an.v[k]) * (an.v[k] + 1.0);
          }
        }
        break;
      }
      case Op::kPick: {
        nodes_[nd.a].g[nd.cols] += nd.g[0];
        break;
      }
      case Op::kDot: {
        const Node& an = nodes_[nd.a];
        const Node& bn = nodes_[nd.b];
        const double g0 = nd.g[0];
        for (std::uint32_t k = 0; k < an.n; ++k) {
          an.g[k] += g0 * bn.v[k];
          bn.g[k] += g0 * an.v[k];
        }
        break;
      }
      case Op::kSum: {
        const Node& an = nodes_[nd.a];
        const double g0 = nd.g[0];
        for (std::uint32_t k = 0; k < an.n; ++k) an.g[k] += g0;
        break;
      }
      case Op::kClampMin: {
        const Node& an = nodes_[nd.a];
        for (std::uint32_t k = 0; k < nd.n; ++k) {
          if (an.v[k] > nd.c0) an.g[k] += nd.g[k];
        }
        break;
      }
    }
  }
}

void Tape::reset() {
  nodes_.clear();
  pack_children_.clear();
  values_.reset();
  grads_.reset();
}

}  // namespace rg::nn
