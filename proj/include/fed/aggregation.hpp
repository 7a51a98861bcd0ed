#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fed/embedding.hpp"

namespace fed {

enum class Aggregation { Mean, Weighted };

std::string_view to_string(Aggregation a) noexcept;
Aggregation parse_aggregation(std::string_view text);

/// Nonnegative finite weights, one per aggregated item. The "at least one
/// positive" rule is enforced by weighted_pool (AllZeroWeights).
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> values() const noexcept { return weights_; }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

struct PageEmbedding {
  EmbeddingVector vector;
  std::uint32_t page_index = 0;
  std::string source_id;
};

struct DocumentEmbedding {
  EmbeddingVector vector;
  std::string doc_id;
  std::uint32_t page_count = 1;
  Aggregation aggregation = Aggregation::Mean;

  friend bool operator==(const DocumentEmbedding&, const DocumentEmbedding&) = default;
};

struct ClassCentroid {
  EmbeddingVector vector;
  std::string label;
  std::uint32_t member_count = 1;

  friend bool operator==(const ClassCentroid&, const ClassCentroid&) = default;
};

/// Element-wise mean, summed in input order in double.
EmbeddingVector mean_pool(std::span<const EmbeddingVector> items);

/// sum_i w_i x_i / sum_i w_i.
EmbeddingVector weighted_pool(std::span<const EmbeddingVector> items, const WeightVector& weights);

/// Page aggregation mode. `weights[i]` belongs to `pages[i]` as passed in;
/// pages (with their weights) are reordered by page_index before pooling.
struct PageAggregation {
  Aggregation kind = Aggregation::Mean;
  std::optional<WeightVector> weights;

  static PageAggregation mean() { return {}; }
  static PageAggregation weighted(WeightVector w) { return {Aggregation::Weighted, std::move(w)}; }
};

DocumentEmbedding build_document_embedding(std::span<const PageEmbedding> pages,
                                           const PageAggregation& mode = {});

struct LabeledDocument {
  DocumentEmbedding document;
  std::string label;
};

/// Class-level aggregation: plain mean, or a per-document weight keyed by doc_id.
struct CentroidAggregation {
  Aggregation kind = Aggregation::Mean;
  std::map<std::string, double> doc_weights;

  static CentroidAggregation mean() { return {}; }
  static CentroidAggregation weighted_by(std::map<std::string, double> w) {
    return {Aggregation::Weighted, std::move(w)};
  }
};

/// One centroid per distinct label, ordered lexicographically by label.
/// Within a class, documents are pooled in input order.
std::vector<ClassCentroid> build_class_centroids(std::span<const LabeledDocument> samples,
                                                 const CentroidAggregation& mode = {});

}  // namespace fed
