#include "fed/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fed {

namespace {

void check_same_dim(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "dim " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

double sum_of_squares(std::span<const float> a) noexcept {
  double acc = 0.0;
  for (float x : a) {
    const double v = x;
    acc += v * v;
  }
  return acc;
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNormVector: return "ZeroNormVector";
    case ErrorCode::InvalidVector: return "InvalidVector";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::AllZeroWeights: return "AllZeroWeights";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::MissingWeight: return "MissingWeight";
    case ErrorCode::DuplicatePage: return "DuplicatePage";
    case ErrorCode::MixedDocuments: return "MixedDocuments";
    case ErrorCode::NoClasses: return "NoClasses";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::TooFewVectors: return "TooFewVectors";
    case ErrorCode::BadNlist: return "BadNlist";
    case ErrorCode::NotTrained: return "NotTrained";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::BadNprobe: return "BadNprobe";
    case ErrorCode::BadK: return "BadK";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::ProviderBadResponse: return "ProviderBadResponse";
    case ErrorCode::ContentRejected: return "ContentRejected";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InconsistentDim: return "InconsistentDim";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::CrcMismatch: return "CrcMismatch";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::BadLabelRef: return "BadLabelRef";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::TooFewClasses: return "TooFewClasses";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::BadMagic:
    case ErrorCode::CrcMismatch:
    case ErrorCode::TruncatedFile:
    case ErrorCode::BadLabelRef:
    case ErrorCode::UnsupportedVersion:
      return ErrorCategory::Io;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::ProviderBadResponse:
    case ErrorCode::ContentRejected:
      return ErrorCategory::Provider;
    case ErrorCode::Internal:
      return ErrorCategory::Internal;
    default:
      return ErrorCategory::Validation;
  }
}

int exit_code(ErrorCategory cat) noexcept {
  switch (cat) {
    case ErrorCategory::Io: return 2;
    case ErrorCategory::Provider: return 3;
    case ErrorCategory::Validation: return 4;
    case ErrorCategory::Internal: return 5;
  }
  return 5;
}

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidVector, "embedding must have dim >= 1");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidVector, "non-finite component at index " + std::to_string(i));
    }
  }
}

EmbeddingVector EmbeddingVector::zeros(std::size_t dim) {
  return EmbeddingVector(std::vector<float>(dim, 0.0f));
}

EmbeddingVector EmbeddingVector::scaled(double s) const {
  std::vector<float> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out[i] = static_cast<float>(s * static_cast<double>(values_[i]));
  }
  return EmbeddingVector(std::move(out));
}

std::string_view to_string(SimilarityMeasure m) noexcept {
  return m == SimilarityMeasure::Cosine ? "cosine" : "l2";
}

SimilarityMeasure parse_measure(std::string_view text) {
  if (text == "cosine") return SimilarityMeasure::Cosine;
  if (text == "l2") return SimilarityMeasure::L2;
  throw Error(ErrorCode::InvalidArgument, "unknown measure '" + std::string(text) + "'");
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_same_dim(a, b);
  const auto av = a.values();
  const auto bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    acc += static_cast<double>(av[i]) * static_cast<double>(bv[i]);
  }
  return acc;
}

double l2_norm(const EmbeddingVector& a) noexcept { return std::sqrt(sum_of_squares(a.values())); }

double squared_l2_distance(std::span<const float> a, std::span<const float> b) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return acc;
}

double l2_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_same_dim(a, b);
  return std::sqrt(squared_l2_distance(a.values(), b.values()));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  check_same_dim(a, b);
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroNormVector, "cosine undefined for zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double score(SimilarityMeasure m, const EmbeddingVector& a, const EmbeddingVector& b) {
  return m == SimilarityMeasure::Cosine ? cosine_similarity(a, b) : l2_distance(a, b);
}

EmbeddingVector normalized(const EmbeddingVector& a) {
  const double n = l2_norm(a);
  if (n == 0.0) throw Error(ErrorCode::ZeroNormVector, "cannot normalize zero vector");
  return a.scaled(1.0 / n);
}

}  // namespace fed
