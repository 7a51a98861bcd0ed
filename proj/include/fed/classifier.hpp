#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fed/aggregation.hpp"
#include "fed/embedding.hpp"

namespace fed {

struct RankedClass {
  std::string label;
  double score = 0.0;

  friend bool operator==(const RankedClass&, const RankedClass&) = default;
};

/// Nearest-centroid outcome. `ranking` covers every class, best first:
/// descending similarity for cosine, ascending distance for L2. Equal scores
/// fall back to the lexicographically smaller label.
struct ClassificationResult {
  std::string predicted_label;
  std::vector<RankedClass> ranking;
  SimilarityMeasure measure = SimilarityMeasure::Cosine;
  std::size_t query_dim = 0;

  friend bool operator==(const ClassificationResult&, const ClassificationResult&) = default;
};

ClassificationResult classify(const EmbeddingVector& query, std::span<const ClassCentroid> centroids,
                              SimilarityMeasure measure = SimilarityMeasure::Cosine);

struct BatchQuery {
  std::string doc_id;
  EmbeddingVector vector;
};

struct BatchError {
  ErrorCode code;
  std::string message;
};

/// Exactly one of `result` / `error` is set.
struct BatchEntry {
  std::string doc_id;
  std::optional<ClassificationResult> result;
  std::optional<BatchError> error;
};

/// Output order matches input order. A failing query yields an error entry
/// and does not stop the batch. `parallelism` > 1 splits queries across threads.
std::vector<BatchEntry> classify_batch(std::span<const BatchQuery> queries,
                                       std::span<const ClassCentroid> centroids,
                                       SimilarityMeasure measure = SimilarityMeasure::Cosine,
                                       unsigned parallelism = 1);

}  // namespace fed
