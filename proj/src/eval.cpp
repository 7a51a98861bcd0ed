#include "fed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fed/random.hpp"

namespace fed {

void SplitSpec::validate() const {
  for (double f : {train_frac, val_frac, test_frac}) {
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorCode::InvalidSplit, "split fractions must lie in (0, 1)");
  }
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidSplit, "split fractions must sum to 1");
  }
}

SplitSizes split_sizes(std::size_t n, const SplitSpec& spec) {
  const auto nd = static_cast<double>(n);
  std::size_t train = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(nd * spec.train_frac)));
  std::size_t val = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(nd * spec.val_frac)));
  while (train + val > n - 1) {
    if (train >= val && train > 1) {
      --train;
    } else {
      --val;
    }
  }
  return {train, val, n - train - val};
}

SplitResult stratified_split(std::span<const IdLabel> samples, const SplitSpec& spec) {
  spec.validate();
  std::map<std::string, std::vector<std::uint64_t>> by_label;
  for (const auto& s : samples) by_label[s.label].push_back(s.id);

  SplitResult out;
  for (auto& [label, ids] : by_label) {
    if (ids.size() < 3) {
      throw Error(ErrorCode::ClassTooSmall, "class '" + label + "' has " + std::to_string(ids.size()) +
                                                " samples, need 3");
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw Error(ErrorCode::DuplicateId, "repeated id in class '" + label + "'");
    }
    SplitMix64 rng(spec.seed ^ fnv1a64(label));
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.next_below(i + 1));
      std::swap(ids[i], ids[j]);
    }
    const auto sizes = split_sizes(ids.size(), spec);
    const auto train_end = ids.begin() + static_cast<std::ptrdiff_t>(sizes.train);
    const auto val_end = train_end + static_cast<std::ptrdiff_t>(sizes.val);
    out.train.insert(out.train.end(), ids.begin(), train_end);
    out.val.insert(out.val.end(), train_end, val_end);
    out.test.insert(out.test.end(), val_end, ids.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), counts_(labels_.size(), std::vector<std::uint64_t>(labels_.size(), 0)) {}

std::size_t ConfusionMatrix::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorCode::BadLabelRef, "label '" + label + "' not in confusion matrix");
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(const std::string& truth, const std::string& predicted, std::uint64_t n) {
  counts_[index_of(truth)][index_of(predicted)] += n;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& row : counts_)
    for (auto c : row) t += c;
  return t;
}

std::string_view to_string(Averaging a) noexcept { return a == Averaging::Macro ? "macro" : "micro"; }

Averaging parse_averaging(std::string_view text) {
  if (text == "macro") return Averaging::Macro;
  if (text == "micro") return Averaging::Micro;
  throw Error(ErrorCode::InvalidArgument, "unknown averaging '" + std::string(text) + "'");
}

namespace {

double safe_ratio(std::uint64_t num, std::uint64_t den, bool& undefined) {
  undefined = den == 0;
  return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r, bool& undefined) {
  undefined = p + r == 0.0;
  return undefined ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm, Averaging averaging) {
  const std::size_t k = cm.size();
  const std::uint64_t total = cm.total();
  if (k == 0 || total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");

  std::vector<std::uint64_t> row_sum(k, 0), col_sum(k, 0);
  std::uint64_t trace = 0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      row_sum[r] += cm.at(r, c);
      col_sum[c] += cm.at(r, c);
    }
    trace += cm.at(r, r);
  }

  MetricsReport rep;
  rep.averaging = averaging;
  rep.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    ClassMetrics m;
    const std::uint64_t tp = cm.at(i, i);
    m.support = row_sum[i];
    m.precision = safe_ratio(tp, col_sum[i], m.precision_undefined);
    m.recall = safe_ratio(tp, row_sum[i], m.recall_undefined);
    m.f1 = harmonic(m.precision, m.recall, m.f1_undefined);
    sum_p += m.precision;
    sum_r += m.recall;
    sum_f += m.f1;
    rep.per_class[std::string(cm.labels()[i])] = m;
  }

  if (averaging == Averaging::Macro) {
    const auto kd = static_cast<double>(k);
    rep.precision = sum_p / kd;
    rep.recall = sum_r / kd;
    rep.f1 = sum_f / kd;
  } else {
    // pooled: every off-diagonal count is one fp and one fn
    bool unused = false;
    rep.precision = safe_ratio(trace, total, unused);
    rep.recall = rep.precision;
    rep.f1 = harmonic(rep.precision, rep.recall, unused);
  }
  return rep;
}

EvaluationResult run_evaluation(const StoreContents& store, const EvaluationOptions& options) {
  options.split.validate();
  std::vector<IdLabel> pairs;
  pairs.reserve(store.samples.size());
  std::map<std::string, std::size_t> class_sizes;
  for (const auto& s : store.samples) {
    pairs.push_back({s.id, s.label});
    ++class_sizes[s.label];
  }
  if (class_sizes.size() < 2) {
    throw Error(ErrorCode::TooFewClasses, "evaluation needs samples from at least 2 classes, store has " +
                                              std::to_string(class_sizes.size()));
  }

  EvaluationResult res;
  res.split = stratified_split(pairs, options.split);

  std::unordered_map<std::uint64_t, const StoredSample*> by_id;
  for (const auto& s : store.samples) by_id[s.id] = &s;

  std::vector<LabeledDocument> train;
  train.reserve(res.split.train.size());
  for (auto id : res.split.train) {
    const auto* s = by_id.at(id);
    train.push_back({DocumentEmbedding{s->vector, std::to_string(id), 1, Aggregation::Mean}, s->label});
  }
  res.centroids = build_class_centroids(train);

  std::vector<BatchQuery> queries;
  queries.reserve(res.split.test.size());
  for (auto id : res.split.test) queries.push_back({std::to_string(id), by_id.at(id)->vector});
  const auto results = classify_batch(queries, res.centroids, options.measure, options.parallelism);

  std::vector<std::string> labels;
  for (const auto& [label, n] : class_sizes) labels.push_back(label);
  res.confusion = ConfusionMatrix(labels);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].error) {
      throw Error(results[i].error->code, "test document " + results[i].doc_id + ": " + results[i].error->message);
    }
    res.confusion.add(by_id.at(res.split.test[i])->label, results[i].result->predicted_label);
  }
  res.report = compute_metrics(res.confusion, options.averaging);
  return res;
}

}  // namespace fed
