#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "refgame/nnkit/tensor.hpp"

namespace rg::nn {

// Reverse-mode autodiff over a flat op tape. A forward pass records vector
// ops; backward() walks the tape in reverse and accumulates gradients.
//
// Parameter leaves reference Tensor storage directly, so their gradients land
// in ParamStore without any copying. Intermediate values and gradients live in
// chunked arenas that are recycled by reset(); a tape can run many episodes
// without touching the allocator.
//
// Gradients ACCUMULATE across backward() calls; callers zero ParamStore grads
// between updates (the optimizer does this after each step).
class Tape {
 public:
  using Id = std::uint32_t;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf over external parameter storage. Gradient accumulates into t.g.
  Id param(Tensor& t);

  // Leaf over an external (values, grad) pair, e.g. one row of an embedding
  // table. Gradient accumulates into g.
  Id param_view(const double* v, double* g, std::uint32_t n);

  // Leaf viewing external read-only values (e.g. image features). The pointer
  // must stay valid for the duration of the pass. No gradient flows out.
  Id input(const double* v, std::uint32_t n);

  // Leaf copied into the arena.
  Id constant(std::span<const double> v);

  // y = W x, with W a rank-2 param/leaf of shape [rows, cols].
  Id matvec(Id w, Id x);

  Id add(Id a, Id b);   // elementwise, equal length
  Id sub(Id a, Id b);   // elementwise, equal length
  Id mul(Id a, Id b);   // elementwise, equal length
  Id affine(Id x, double scale, double shift);  // scale * x + shift
  Id sigmoid(Id x);
  Id tanh(Id x);
  Id exp(Id x);
  Id min2(Id a, Id b);  // elementwise min; gradient follows the smaller side

  // Concatenates nodes into one vector (e.g. per-candidate scores into a
  // distribution input).
  Id pack(std::span<const Id> parts);

  // Numerically stable log-softmax (max subtraction).
  Id log_softmax(Id x);

  // Entropy -sum(exp(l) * l) of a log-probability vector. Scalar.
  Id entropy(Id log_probs);

  Id pick(Id x, std::uint32_t index);  // scalar x[index]
  Id dot(Id a, Id b);                  // scalar
  Id sum(Id x);                        // scalar
  Id clamp_min(Id x, double floor);    // elementwise max(x, floor)

  std::span<const double> values(Id id) const;
  double scalar(Id id) const;

  // Seeds d(loss)/d(loss) = 1 and propagates to every reachable leaf. The
  // loss must be scalar. Throws std::logic_error if nothing was recorded.
  void backward(Id loss);

  // Discards the recorded graph but keeps arena capacity.
  void reset();

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    kParam,
    kInput,
    kConst,
    kMatVec,
    kAdd,
    kSub,
    kMul,
    kAffine,
    kSigmoid,
    kTanh,
    kExp,
    kMin2,
    kPack,
    kLogSoftmax,
    kEntropy,
    kPick,
    kDot,
    kSum,
    kClampMin,
  };

  struct Node {
    Op op;
    Id a = 0, b = 0;
    std::uint32_t n = 0;     // output length
    std::uint32_t rows = 0;  // matvec
    std::uint32_t cols = 0;  // matvec / pick index
    double c0 = 0.0, c1 = 0.0;
    const double* v = nullptr;  // output values
    double* g = nullptr;        // output gradient
  };

  // Bump allocator over fixed blocks; pointers stay valid across growth.
  class Arena {
   public:
    double* alloc(std::size_t n);
    void reset();

   private:
    static constexpr std::size_t kBlock = 1 << 16;
    std::vector<std::unique_ptr<double[]>> blocks_;
    std::vector<std::size_t> block_sizes_;
    std::size_t cur_ = 0;
    std::size_t off_ = 0;
  };

  Id push(Node nd);
  // Allocates output storage (values + zeroed gradient) for a fresh node.
  void alloc_out(Node& nd, std::uint32_t n);
  double* mutable_values(Id id);

  std::vector<Node> nodes_;
  std::vector<Id> pack_children_;
  Arena values_;
  Arena grads_;
};

}  // namespace rg::nn
