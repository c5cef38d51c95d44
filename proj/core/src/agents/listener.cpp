#include "refgame/agents/listener.hpp"

#include <cmath>
#include <stdexcept>

#include "refgame/nnkit/mathutil.hpp"

namespace rg::agents {

using nn::Tape;
using world::Vocabulary;

ListenerNet::ListenerNet(ListenerDims dims, std::uint64_t seed) : dims_(dims) {
  Rng rng(derive_seed(seed, 0x11573e4ull));
  embed_ = nn::Embedding::create(params_, "embed", dims_.vocab, dims_.d_emb, rng);
  cell_ = nn::GruCell::create(params_, "gru", dims_.d_emb, dims_.joint, rng);
  img_enc_ = nn::Dense::create(params_, "img_enc", dims_.d_img, dims_.joint, rng);
}

Tape::Id ListenerNet::caption_code(Tape& tape, std::span<const std::uint32_t> tokens) {
  std::vector<double> zero(dims_.joint, 0.0);
  Tape::Id h = tape.constant(zero);
  h = cell_.step(tape, h, embed_.row(tape, Vocabulary::kBos));
  for (std::uint32_t tok : tokens) {
    if (tok >= dims_.vocab) throw std::invalid_argument("listener: token id out of range");
    if (tok < Vocabulary::kReservedCount) continue;
    h = cell_.step(tape, h, embed_.row(tape, tok));
  }
  return h;
}

Tape::Id ListenerNet::image_code(Tape& tape, std::span<const double> features) {
  if (features.size() != dims_.d_img) throw std::invalid_argument("listener: image dim mismatch");
  return img_enc_.apply(tape, tape.input(features.data(), dims_.d_img));
}

std::vector<double> ListenerNet::probs(Tape& tape, std::span<const std::uint32_t> tokens,
                                       std::span<const double* const> images) {
  if (images.size() < 2) throw std::invalid_argument("listener: need at least 2 candidates");
  const Tape::Id cap = caption_code(tape, tokens);
  std::vector<double> dots(images.size());
  for (std::size_t j = 0; j < images.size(); ++j) {
    dots[j] = tape.scalar(tape.dot(image_code(tape, {images[j], dims_.d_img}), cap));
  }
  return nn::softmax(dots);
}

Tape::Id ListenerNet::game_loss(Tape& tape, std::span<const std::uint32_t> tokens,
                                std::span<const double* const> images, std::uint32_t target) {
  if (images.size() < 2) throw std::invalid_argument("listener: need at least 2 candidates");
  if (target >= images.size()) throw std::invalid_argument("listener: target out of range");
  const Tape::Id cap = caption_code(tape, tokens);
  std::vector<Tape::Id> dots;
  dots.reserve(images.size());
  for (std::size_t j = 0; j < images.size(); ++j) {
    dots.push_back(tape.dot(image_code(tape, {images[j], dims_.d_img}), cap));
  }
  const Tape::Id lp = tape.log_softmax(tape.pack(dots));
  const Tape::Id picked = tape.clamp_min(tape.pick(lp, target), std::log(nn::kProbFloor));
  return tape.affine(picked, -1.0, 0.0);
}

std::vector<double> ListenerNet::caption_embedding(Tape& tape,
                                                   std::span<const std::uint32_t> tokens) {
  const Tape::Id code = caption_code(tape, tokens);
  const auto v = tape.values(code);
  return {v.begin(), v.end()};
}

void FeedbackThresholds::validate() const {
  if (!(theta1 > 0.0 && theta1 < theta2 && theta2 < 1.0)) {
    throw std::invalid_argument("thresholds: need 0 < theta1 < theta2 < 1");
  }
}

ListenerResponse listener_respond(ListenerNet& listener, Tape& tape,
                                  std::span<const std::uint32_t> utterance,
                                  std::span<const double* const> candidates,
                                  const world::Caption& target_caption,
                                  const FeedbackThresholds& thresholds) {
  thresholds.validate();
  ListenerResponse r;
  r.distribution = listener.probs(tape, utterance, candidates);
  const std::size_t best = nn::argmax(r.distribution);
  r.p_max = r.distribution[best];
  if (r.p_max < thresholds.theta1) {
    r.choice = kNoop;
  } else if (r.p_max < thresholds.theta2) {
    r.choice = static_cast<std::int32_t>(best);
    r.linguistic_input = target_caption;
  } else {
    r.choice = static_cast<std::int32_t>(best);
  }
  return r;
}

double reward(const ListenerResponse& response, std::uint32_t target_index,
              const RewardConfig& cfg) {
  if (!response.acted()) return -cfg.w_noop;
  return response.choice == static_cast<std::int32_t>(target_index) ? 1.0 : -1.0;
}

}  // namespace rg::agents
