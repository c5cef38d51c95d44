#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "refgame/nnkit/layers.hpp"
#include "refgame/nnkit/rng.hpp"
#include "refgame/nnkit/tape.hpp"
#include "refgame/nnkit/tensor.hpp"

namespace rg::agents {

// Paper-wide cap on utterance length.
inline constexpr std::uint32_t kMaxUtteranceLen = 20;

struct SpeakerDims {
  std::uint32_t vocab = 0;
  std::uint32_t d_img = 64;
  std::uint32_t d_emb = 16;
  std::uint32_t hidden = 32;
};

// Image-conditioned autoregressive utterance generator with a value head.
//
//   h_0 = tanh(P x)                     image projection
//   h_t = GRU(h_{t-1}, E[u_{t-1}])      decoder step (u_0 = BOS)
//   P(u_t | u_<t, x) = softmax(W h_t)   over the vocabulary, PAD/BOS masked
//   V(s_t) = v . h_t + c                per-position value estimate
//
// An utterance is a token sequence without BOS; if generation stopped at EOS
// the trailing EOS is part of the sequence (it is an action), and nothing
// follows it. Reported log-probabilities are always those of the untempered
// model distribution.
//
// Forward passes mutate only the tape; run one net+tape per thread.
class SpeakerNet {
 public:
  SpeakerNet(SpeakerDims dims, std::uint64_t seed);

  const SpeakerDims& dims() const { return dims_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  struct StepNodes {
    nn::Tape::Id log_prob;  // scalar log P(token | prefix, image)
    nn::Tape::Id value;     // scalar V at this position
    nn::Tape::Id entropy;   // scalar entropy of the position's distribution
  };

  // Teacher-forced pass over a recorded utterance. Throws on invalid token
  // ids or length > kMaxUtteranceLen.
  std::vector<StepNodes> teacher_forced(nn::Tape& tape, std::span<const double> image,
                                        std::span<const std::uint32_t> tokens);

  // Per-token log P(u_i | u_<i, x); depends only on the target image.
  std::vector<double> log_probs(nn::Tape& tape, std::span<const double> image,
                                std::span<const std::uint32_t> tokens);

  struct Sample {
    std::vector<std::uint32_t> tokens;
    std::vector<double> log_probs;  // sampling-time, untempered
    std::vector<double> values;
    bool ended_with_eos = false;

    double sum_log_prob() const {
      double s = 0.0;
      for (double lp : log_probs) s += lp;
      return s;
    }
    // Token count excluding a trailing EOS.
    std::size_t content_length() const {
      return tokens.size() - (ended_with_eos ? 1 : 0);
    }
  };

  // Ancestral sampling; stops at EOS or max_len. temperature == 0 decodes
  // greedily. max_len must be in [1, kMaxUtteranceLen], temperature >= 0.
  Sample sample(nn::Tape& tape, std::span<const double> image, std::uint32_t max_len,
                double temperature, Rng& rng);

 private:
  struct Step {
    nn::Tape::Id state;      // decoder state after consuming the prefix
    nn::Tape::Id log_probs;  // full log-distribution at this position
    nn::Tape::Id value;
  };
  Step advance(nn::Tape& tape, nn::Tape::Id h, std::uint32_t prev_token);

  SpeakerDims dims_;
  nn::ParamStore params_;
  nn::Dense img_proj_;
  nn::Embedding embed_;
  nn::GruCell cell_;
  nn::Dense out_;
  nn::Dense value_;
  std::vector<double> logit_mask_;  // -1e9 at PAD and BOS
};

}  // namespace rg::agents
