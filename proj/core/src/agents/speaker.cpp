#include "refgame/agents/speaker.hpp"

#include <cmath>
#include <stdexcept>

#include "refgame/nnkit/mathutil.hpp"
#include "refgame/world/types.hpp"

namespace rg::agents {

using nn::Tape;

SpeakerNet::SpeakerNet(SpeakerDims dims, std::uint64_t seed) : dims_(dims) {
  Rng rng(derive_seed(seed, 0x5bea7e2ull));
  img_proj_ = nn::Dense::create(params_, "img_proj", dims_.d_img, dims_.hidden, rng);
  embed_ = nn::Embedding::create(params_, "embed", dims_.vocab, dims_.d_emb, rng);
  cell_ = nn::GruCell::create(params_, "gru", dims_.d_emb, dims_.hidden, rng);
  out_ = nn::Dense::create(params_, "out", dims_.hidden, dims_.vocab, rng);
  value_ = nn::Dense::create(params_, "value", dims_.hidden, 1, rng);
  logit_mask_.assign(dims_.vocab, 0.0);
  logit_mask_[world::Vocabulary::kPad] = -1e9;
  logit_mask_[world::Vocabulary::kBos] = -1e9;
}

SpeakerNet::Step SpeakerNet::advance(Tape& tape, Tape::Id h, std::uint32_t prev_token) {
  const Tape::Id x = embed_.row(tape, prev_token);
  const Tape::Id h2 = cell_.step(tape, h, x);
  const Tape::Id logits = out_.apply(tape, h2);
  const Tape::Id mask = tape.input(logit_mask_.data(), dims_.vocab);
  const Tape::Id lp = tape.log_softmax(tape.add(logits, mask));
  const Tape::Id v = value_.apply(tape, h2);
  return {h2, lp, v};
}

std::vector<SpeakerNet::StepNodes> SpeakerNet::teacher_forced(
    Tape& tape, std::span<const double> image, std::span<const std::uint32_t> tokens) {
  if (image.size() != dims_.d_img) throw std::invalid_argument("speaker: image dim mismatch");
  if (tokens.size() > kMaxUtteranceLen) {
    throw std::invalid_argument("speaker: utterance longer than the length cap");
  }
  for (std::uint32_t t : tokens) {
    if (t >= dims_.vocab) throw std::invalid_argument("speaker: token id out of range");
  }
  Tape::Id h = tape.tanh(img_proj_.apply(tape, tape.input(image.data(), dims_.d_img)));
  std::uint32_t prev = world::Vocabulary::kBos;
  std::vector<StepNodes> out;
  out.reserve(tokens.size());
  for (std::uint32_t tok : tokens) {
    const Step s = advance(tape, h, prev);
    out.push_back({tape.pick(s.log_probs, tok), s.value, tape.entropy(s.log_probs)});
    h = s.state;
    prev = tok;
  }
  return out;
}

std::vector<double> SpeakerNet::log_probs(Tape& tape, std::span<const double> image,
                                          std::span<const std::uint32_t> tokens) {
  const auto nodes = teacher_forced(tape, image, tokens);
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const StepNodes& n : nodes) out.push_back(tape.scalar(n.log_prob));
  return out;
}

SpeakerNet::Sample SpeakerNet::sample(Tape& tape, std::span<const double> image,
                                      std::uint32_t max_len, double temperature, Rng& rng) {
  if (max_len < 1 || max_len > kMaxUtteranceLen) {
    throw std::invalid_argument("speaker: max_len out of range");
  }
  if (temperature < 0.0) throw std::invalid_argument("speaker: negative temperature");
  if (image.size() != dims_.d_img) throw std::invalid_argument("speaker: image dim mismatch");

  Sample sample;
  Tape::Id h = tape.tanh(img_proj_.apply(tape, tape.input(image.data(), dims_.d_img)));
  std::uint32_t prev = world::Vocabulary::kBos;
  for (std::uint32_t t = 0; t < max_len; ++t) {
    const Step s = advance(tape, h, prev);
    const std::span<const double> lp = tape.values(s.log_probs);

    std::uint32_t tok;
    if (temperature == 0.0) {
      tok = static_cast<std::uint32_t>(nn::argmax(lp));
    } else if (temperature == 1.0) {
      // Gumbel-free inverse-CDF draw over the model distribution.
      double u = rng.uniform();
      tok = dims_.vocab - 1;
      double acc = 0.0;
      for (std::uint32_t i = 0; i < dims_.vocab; ++i) {
        acc += std::exp(lp[i]);
        if (u < acc) {
          tok = i;
          break;
        }
      }
    } else {
      std::vector<double> scaled(dims_.vocab);
      for (std::uint32_t i = 0; i < dims_.vocab; ++i) scaled[i] = lp[i] / temperature;
      const std::vector<double> probs = nn::softmax(scaled);
      double u = rng.uniform();
      tok = dims_.vocab - 1;
      double acc = 0.0;
      for (std::uint32_t i = 0; i < dims_.vocab; ++i) {
        acc += probs[i];
        if (u < acc) {
          tok = i;
          break;
        }
      }
    }

    sample.tokens.push_back(tok);
    sample.log_probs.push_back(lp[tok]);
    sample.values.push_back(tape.scalar(s.value));
    if (tok == world::Vocabulary::kEos) {
      sample.ended_with_eos = true;
      break;
    }
    h = s.state;
    prev = tok;
  }
  return sample;
}

}  // namespace rg::agents
