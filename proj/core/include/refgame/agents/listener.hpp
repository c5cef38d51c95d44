#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "refgame/nnkit/layers.hpp"
#include "refgame/nnkit/rng.hpp"
#include "refgame/nnkit/tape.hpp"
#include "refgame/nnkit/tensor.hpp"
#include "refgame/world/types.hpp"

namespace rg::agents {

struct ListenerDims {
  std::uint32_t vocab = 0;
  std::uint32_t d_img = 64;
  std::uint32_t d_emb = 16;
  std::uint32_t joint = 32;  // shared caption/image code dimension
};

// Dual-encoder scorer: P(I_j | u) = softmax_j( L(I_j) . L(u) ).
//
// The caption code L(u) is the final state of a GRU run over BOS followed by
// the utterance's content tokens (reserved ids are skipped, so an empty
// utterance encodes as the BOS step alone). The image code is a linear map of
// the feature vector.
class ListenerNet {
 public:
  ListenerNet(ListenerDims dims, std::uint64_t seed);

  const ListenerDims& dims() const { return dims_; }
  nn::ParamStore& params() { return params_; }
  const nn::ParamStore& params() const { return params_; }

  nn::Tape::Id caption_code(nn::Tape& tape, std::span<const std::uint32_t> tokens);
  nn::Tape::Id image_code(nn::Tape& tape, std::span<const double> features);

  // Distribution over candidates (>= 2 required).
  std::vector<double> probs(nn::Tape& tape, std::span<const std::uint32_t> tokens,
                            std::span<const double* const> images);

  // Taped -log P(target | utterance, candidates), probability floored.
  nn::Tape::Id game_loss(nn::Tape& tape, std::span<const std::uint32_t> tokens,
                         std::span<const double* const> images, std::uint32_t target);

  // Plain caption embedding (used as the dense caption vector in similarity
  // indexing).
  std::vector<double> caption_embedding(nn::Tape& tape, std::span<const std::uint32_t> tokens);

 private:
  ListenerDims dims_;
  nn::ParamStore params_;
  nn::Embedding embed_;
  nn::GruCell cell_;
  nn::Dense img_enc_;
};

// Feedback controller thresholds; 0 < theta1 < theta2 < 1.
struct FeedbackThresholds {
  double theta1 = 0.4;
  double theta2 = 0.8;

  void validate() const;
};

inline constexpr std::int32_t kNoop = -1;

struct ListenerResponse {
  std::int32_t choice = kNoop;  // candidate index, or kNoop
  std::optional<world::Caption> linguistic_input;
  double p_max = 0.0;
  std::vector<double> distribution;

  bool acted() const { return choice != kNoop; }
};

struct RewardConfig {
  double w_noop = 0.1;  // must be in [0, 1)
};

// Three-case feedback controller:
//   p_max <  theta1          -> (noop, no input)
//   theta1 <= p_max < theta2 -> (argmax, ground-truth caption)
//   p_max >= theta2          -> (argmax, no input)
// Argmax ties break toward the lowest index.
ListenerResponse listener_respond(ListenerNet& listener, nn::Tape& tape,
                                  std::span<const std::uint32_t> utterance,
                                  std::span<const double* const> candidates,
                                  const world::Caption& target_caption,
                                  const FeedbackThresholds& thresholds);

// +1 correct, -1 wrong, -w_noop on noop.
double reward(const ListenerResponse& response, std::uint32_t target_index,
              const RewardConfig& cfg);

}  // namespace rg::agents
