#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fed/classifier.hpp"
#include "fed/store.hpp"

namespace fed {

struct SplitSpec {
  double train_frac = 0.7;
  double val_frac = 0.1;
  double test_frac = 0.2;
  std::uint64_t seed = 42;

  /// Throws InvalidSplit unless each fraction is in (0,1) and they sum to 1 (1e-9).
  void validate() const;
};

struct SplitResult {
  std::vector<std::uint64_t> train;  // each sorted ascending
  std::vector<std::uint64_t> val;
  std::vector<std::uint64_t> test;
};

struct IdLabel {
  std::uint64_t id = 0;
  std::string label;
};

/// Per-class sizes for n samples: round(n*train), round(n*val), rest to test,
/// nudged so each split keeps at least one sample. Requires n >= 3.
struct SplitSizes {
  std::size_t train = 0, val = 0, test = 0;
};
SplitSizes split_sizes(std::size_t n, const SplitSpec& spec);

/// Stratified split. Within a class the ids are sorted, shuffled with
/// splitmix64(seed ^ fnv1a64(label)) and sliced train | val | test.
SplitResult stratified_split(std::span<const IdLabel> samples, const SplitSpec& spec);

/// rows = true label, columns = predicted label.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> labels);

  void add(const std::string& truth, const std::string& predicted, std::uint64_t n = 1);
  void set(std::size_t row, std::size_t col, std::uint64_t count) { counts_.at(row).at(col) = count; }

  std::span<const std::string> labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint64_t at(std::size_t row, std::size_t col) const { return counts_.at(row).at(col); }
  std::uint64_t total() const noexcept;
  std::size_t index_of(const std::string& label) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

enum class Averaging { Macro, Micro };
std::string_view to_string(Averaging a) noexcept;
Averaging parse_averaging(std::string_view text);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  // set when the metric was 0/0 and reported as 0
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Averaging averaging = Averaging::Macro;
  std::map<std::string, ClassMetrics> per_class;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Throws EmptyMatrix when the matrix has no classes or no counts.
MetricsReport compute_metrics(const ConfusionMatrix& cm, Averaging averaging = Averaging::Macro);

struct EvaluationOptions {
  SplitSpec split;
  SimilarityMeasure measure = SimilarityMeasure::Cosine;
  Averaging averaging = Averaging::Macro;
  unsigned parallelism = 1;
};

struct EvaluationResult {
  MetricsReport report;
  ConfusionMatrix confusion;
  SplitResult split;
  std::vector<ClassCentroid> centroids;  // trained on split.train only
};

/// Split, fit mean centroids on the train ids, classify the test ids. The
/// validation ids are produced but not used.
EvaluationResult run_evaluation(const StoreContents& store, const EvaluationOptions& options);

}  // namespace fed
