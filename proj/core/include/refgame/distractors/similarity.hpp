#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "refgame/agents/listener.hpp"
#include "refgame/world/types.hpp"

namespace rg::distractors {

// Standard cosine similarity; a zero vector is defined to have similarity 0.
double cosine(std::span<const double> u, std::span<const double> v);

// tf = raw count in the caption, idf = ln(corpus size / document frequency).
// Tokens unseen at fit time fall back to the smoothed idf ln(corpus size / 1).
struct TfidfModel {
  std::uint32_t corpus_size = 0;
  std::vector<std::uint32_t> doc_freq;  // per token id
  std::vector<double> idf;              // per token id

  double idf_of(std::uint32_t token) const;
};

TfidfModel tfidf_fit(std::span<const std::vector<std::uint32_t>> captions,
                     std::uint32_t vocab_size);

// Sparse tf-idf vector, sorted by token id.
std::vector<std::pair<std::uint32_t, double>> tfidf_vector(
    const TfidfModel& model, std::span<const std::uint32_t> caption);

double sparse_cosine(std::span<const std::pair<std::uint32_t, double>> a,
                     std::span<const std::pair<std::uint32_t, double>> b);

// w_c * caption_sim + (1 - w_c) * visual_sim.
double hybrid_score(double visual_sim, double caption_sim, double w_c);

enum class MetricKind : std::uint8_t {
  kVisual,
  kCaptionOnehot,
  kCaptionTfidf,
  kCaptionDense,
  kHybrid,
};

std::string_view to_string(MetricKind kind);
MetricKind metric_kind_from_string(std::string_view s);

// HYBRID mixes visual similarity with tf-idf caption similarity via w_c.
// CAPTION_DENSE embeds captions with a pretrained listener's caption encoder.
struct SimilarityMetric {
  MetricKind kind = MetricKind::kVisual;
  double w_c = 0.5;
  agents::ListenerNet* dense_encoder = nullptr;

  void validate() const;
  std::string descriptor() const;  // JSON, stable key order
};

// Per-item representations prepared once so pairwise scoring is cheap.
class PairwiseScorer {
 public:
  PairwiseScorer(const SimilarityMetric& metric,
                 std::span<const world::DatasetItem* const> items, std::uint32_t vocab_size);

  double score(std::size_t i, std::size_t j) const;
  std::size_t size() const { return items_.size(); }

 private:
  MetricKind kind_;
  double w_c_ = 0.0;
  std::vector<const world::DatasetItem*> items_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> sparse_;
  std::vector<std::vector<double>> dense_;
};

std::vector<double> caption_dense_vector(agents::ListenerNet& encoder,
                                         std::span<const std::uint32_t> caption);

}  // namespace rg::distractors
