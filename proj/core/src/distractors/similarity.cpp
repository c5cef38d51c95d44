#include "refgame/distractors/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "refgame/errors.hpp"
#include "refgame/nnkit/tape.hpp"

namespace rg::distractors {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

double TfidfModel::idf_of(std::uint32_t token) const {
  if (token < idf.size() && doc_freq[token] > 0) return idf[token];
  return std::log(static_cast<double>(corpus_size));  // smoothed: ln(N / 1)
}

TfidfModel tfidf_fit(std::span<const std::vector<std::uint32_t>> captions,
                     std::uint32_t vocab_size) {
  if (captions.empty()) throw std::invalid_argument("tfidf_fit: empty corpus");
  TfidfModel m;
  m.corpus_size = static_cast<std::uint32_t>(captions.size());
  m.doc_freq.assign(vocab_size, 0);
  for (const auto& cap : captions) {
    std::vector<bool> seen(vocab_size, false);
    for (std::uint32_t tok : cap) {
      if (tok < vocab_size && !seen[tok]) {
        seen[tok] = true;
        ++m.doc_freq[tok];
      }
    }
  }
  m.idf.assign(vocab_size, 0.0);
  for (std::uint32_t t = 0; t < vocab_size; ++t) {
    if (m.doc_freq[t] > 0) {
      m.idf[t] = std::log(static_cast<double>(m.corpus_size) / m.doc_freq[t]);
    }
  }
  return m;
}

std::vector<std::pair<std::uint32_t, double>> tfidf_vector(
    const TfidfModel& model, std::span<const std::uint32_t> caption) {
  std::map<std::uint32_t, std::uint32_t> counts;
  for (std::uint32_t tok : caption) ++counts[tok];
  std::vector<std::pair<std::uint32_t, double>> out;
  out.reserve(counts.size());
  for (const auto& [tok, tf] : counts) {
    out.emplace_back(tok, static_cast<double>(tf) * model.idf_of(tok));
  }
  return out;
}

double sparse_cosine(std::span<const std::pair<std::uint32_t, double>> a,
                     std::span<const std::pair<std::uint32_t, double>> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first == b[j].first) {
      ab += a[i].second * b[j].second;
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  for (const auto& [t, x] : a) aa += x * x;
  for (const auto& [t, x] : b) bb += x * x;
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double hybrid_score(double visual_sim, double caption_sim, double w_c) {
  if (w_c < 0.0 || w_c > 1.0) throw std::invalid_argument("hybrid_score: w_c out of [0,1]");
  return w_c * caption_sim + (1.0 - w_c) * visual_sim;
}

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kVisual: return "VISUAL";
    case MetricKind::kCaptionOnehot: return "CAPTION_ONEHOT";
    case MetricKind::kCaptionTfidf: return "CAPTION_TFIDF";
    case MetricKind::kCaptionDense: return "CAPTION_DENSE";
    case MetricKind::kHybrid: return "HYBRID";
  }
  return "?";
}

MetricKind metric_kind_from_string(std::string_view s) {
  if (s == "VISUAL") return MetricKind::kVisual;
  if (s == "CAPTION_ONEHOT") return MetricKind::kCaptionOnehot;
  if (s == "CAPTION_TFIDF") return MetricKind::kCaptionTfidf;
  if (s == "CAPTION_DENSE") return MetricKind::kCaptionDense;
  if (s == "HYBRID") return MetricKind::kHybrid;
  throw ConfigError("unknown similarity metric: " + std::string(s));
}

void SimilarityMetric::validate() const {
  if (kind == MetricKind::kHybrid && (w_c < 0.0 || w_c > 1.0)) {
    throw ConfigError("similarity: hybrid w_c out of [0,1]");
  }
  if (kind == MetricKind::kCaptionDense && dense_encoder == nullptr) {
    throw ConfigError("similarity: CAPTION_DENSE requires a caption encoder");
  }
}

std::string SimilarityMetric::descriptor() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind));
  if (kind == MetricKind::kHybrid) j["w_c"] = w_c;
  return j.dump();
}

std::vector<double> caption_dense_vector(agents::ListenerNet& encoder,
                                         std::span<const std::uint32_t> caption) {
  nn::Tape tape;
  return encoder.caption_embedding(tape, caption);
}

PairwiseScorer::PairwiseScorer(const SimilarityMetric& metric,
                               std::span<const world::DatasetItem* const> items,
                               std::uint32_t vocab_size)
    : kind_(metric.kind), w_c_(metric.w_c), items_(items.begin(), items.end()) {
  metric.validate();
  if (kind_ == MetricKind::kCaptionOnehot) {
    sparse_.reserve(items_.size());
    for (const auto* it : items_) {
      std::vector<std::pair<std::uint32_t, double>> v;
      std::vector<std::uint32_t> toks = it->caption.tokens;
      std::sort(toks.begin(), toks.end());
      toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
      for (std::uint32_t t : toks) v.emplace_back(t, 1.0);
      sparse_.push_back(std::move(v));
    }
  } else if (kind_ == MetricKind::kCaptionTfidf || kind_ == MetricKind::kHybrid) {
    std::vector<std::vector<std::uint32_t>> caps;
    caps.reserve(items_.size());
    for (const auto* it : items_) caps.push_back(it->caption.tokens);
    const TfidfModel model = tfidf_fit(caps, vocab_size);
    sparse_.reserve(items_.size());
    for (const auto* it : items_) sparse_.push_back(tfidf_vector(model, it->caption.tokens));
  } else if (kind_ == MetricKind::kCaptionDense) {
    nn::Tape tape;
    dense_.reserve(items_.size());
    for (const auto* it : items_) {
      tape.reset();
      dense_.push_back(metric.dense_encoder->caption_embedding(tape, it->caption.tokens));
    }
  }
}

double PairwiseScorer::score(std::size_t i, std::size_t j) const {
  switch (kind_) {
    case MetricKind::kVisual:
      return cosine(items_[i]->image.features, items_[j]->image.features);
    case MetricKind::kCaptionOnehot:
    case MetricKind::kCaptionTfidf:
      return sparse_cosine(sparse_[i], sparse_[j]);
    case MetricKind::kCaptionDense:
      return cosine(dense_[i], dense_[j]);
    case MetricKind::kHybrid:
      return hybrid_score(cosine(items_[i]->image.features, items_[j]->image.features),
                          sparse_cosine(sparse_[i], sparse_[j]), w_c_);
  }
  return 0.0;
}

}  // namespace rg::distractors
