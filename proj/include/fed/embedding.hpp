#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "fed/error.hpp"

namespace fed {

/// Dense embedding. Components are stored as 32-bit floats; every reduction
/// over them accumulates in double, strictly left to right.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  /// Throws InvalidVector if `values` is empty or holds a non-finite entry.
  explicit EmbeddingVector(std::vector<float> values);
  EmbeddingVector(std::initializer_list<float> values)
      : EmbeddingVector(std::vector<float>(values)) {}

  static EmbeddingVector zeros(std::size_t dim);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Component-wise s * v, rounded back to float.
  EmbeddingVector scaled(double s) const;

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  std::vector<float> values_;
};

enum class SimilarityMeasure { Cosine, L2 };

std::string_view to_string(SimilarityMeasure m) noexcept;
/// Accepts "cosine" / "l2" (case-sensitive). Throws InvalidArgument otherwise.
SimilarityMeasure parse_measure(std::string_view text);

/// True when a larger score is better (cosine); false for distances.
constexpr bool higher_is_better(SimilarityMeasure m) noexcept {
  return m == SimilarityMeasure::Cosine;
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double l2_norm(const EmbeddingVector& a) noexcept;
double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b);
double squared_l2_distance(std::span<const float> a, std::span<const float> b) noexcept;

/// dot(a,b) / (|a| |b|), clamped to [-1, 1]. Throws ZeroNormVector when
/// either norm is 0 and DimensionMismatch when dims differ.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Score of `b` against `a` under `m`: cosine similarity or L2 distance.
double score(SimilarityMeasure m, const EmbeddingVector& a, const EmbeddingVector& b);

/// a / |a|. Throws ZeroNormVector for the zero vector.
EmbeddingVector normalized(const EmbeddingVector& a);

}  // namespace fed
