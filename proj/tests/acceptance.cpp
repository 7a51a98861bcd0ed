// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "fed/aggregation.hpp"
#include "fed/classifier.hpp"
#include "fed/eval.hpp"
#include "fed/ingestion.hpp"
#include "fed/random.hpp"
#include "fed/store.hpp"
#include "fed/vector_index.hpp"
#include "test_support.hpp"

using namespace fed;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && failures_++ < 5) msgs_ << (msgs_.tellp() > 0 ? "; " : "") << what;
  }
  Outcome done(const std::string& detail) const {
    if (failures_ == 0) return {true, detail};
    return {false, std::to_string(failures_) + " failure(s): " + msgs_.str()};
  }

 private:
  int failures_ = 0;
  std::ostringstream msgs_;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Synthetic five-class corpus

constexpr std::size_t kSynthDim = 64;
constexpr int kSynthClasses = 5;
constexpr int kDocsPerClass = 40;
const char* const kClassNames[kSynthClasses] = {"1099", "bank_statement", "prospectus", "sec_10k", "w2"};

struct SynthCorpus {
  std::vector<std::vector<double>> centers;
  std::vector<std::string> labels;                 // per document
  std::vector<std::vector<double>> noise;          // unit-sigma draws per document
};

SynthCorpus make_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SynthCorpus c;
  while (static_cast<int>(c.centers.size()) < kSynthClasses) {
    std::vector<double> v(kSynthDim);
    for (auto& x : v) x = n(rng);
    const double norm = std::sqrt(test::naive_dot(v, v));
    for (auto& x : v) x /= norm;
    bool ok = true;
    for (const auto& o : c.centers) ok = ok && test::naive_dot(v, o) < 0.3;
    if (ok) c.centers.push_back(std::move(v));
  }
  for (int k = 0; k < kSynthClasses; ++k) {
    for (int i = 0; i < kDocsPerClass; ++i) {
      std::vector<double> e(kSynthDim);
      for (auto& x : e) x = n(rng);
      c.noise.push_back(std::move(e));
      c.labels.push_back(kClassNames[k]);
    }
  }
  return c;
}

std::vector<float> document_vector(const SynthCorpus& c, std::size_t doc, double sigma) {
  const int k = static_cast<int>(doc / kDocsPerClass);
  std::vector<float> v(kSynthDim);
  for (std::size_t m = 0; m < kSynthDim; ++m) v[m] = static_cast<float>(c.centers[k][m] + sigma * c.noise[doc][m]);
  return v;
}

struct PipelineRun {
  EvaluationResult result;
  StoreContents store;
  double seconds = 0.0;
};

/// manifest of precomputed page vectors -> ingestion -> FEDS store on disk ->
/// read back -> split / centroids / classify / metrics
PipelineRun run_pipeline(const SynthCorpus& corpus, double sigma, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Manifest manifest;
  manifest.dim = kSynthDim;
  for (std::size_t d = 0; d < corpus.labels.size(); ++d) {
    ManifestDocument doc;
    doc.doc_id = "doc" + std::to_string(d);
    doc.label = corpus.labels[d];
    PageLocator page;
    page.vector = document_vector(corpus, d, sigma);
    doc.pages.push_back(std::move(page));
    manifest.documents.push_back(std::move(doc));
  }
  const MockProvider provider(kSynthDim);
  const auto ingested = ingest_manifest(manifest, provider, Aggregation::Mean);
  if (!ingested.failures.empty()) throw Error(ErrorCode::Internal, "ingestion failed");

  std::vector<LabeledSample> samples;
  std::vector<LabeledDocument> labeled;
  for (const auto& d : ingested.documents) {
    samples.push_back({d.manifest_index, *d.label, d.embedding});
    labeled.push_back({d.embedding, *d.label});
  }
  test::TempDir dir;
  write_store(dir / "synthetic.feds", kSynthDim, std::span<const LabeledSample>(samples),
              build_class_centroids(labeled));

  PipelineRun run;
  run.store = read_store(dir / "synthetic.feds");
  EvaluationOptions opts;
  opts.split = SplitSpec{0.7, 0.1, 0.2, seed};
  opts.measure = SimilarityMeasure::Cosine;
  opts.averaging = Averaging::Macro;
  run.result = run_evaluation(run.store, opts);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

struct OracleMetrics {
  double accuracy, precision, recall, f1;
  std::vector<std::string> predicted;
};

/// Brute force over the same split: per-class means, naive cosine argmax,
/// metrics from explicit per-class loops.
OracleMetrics oracle_metrics(const StoreContents& store, const SplitResult& split) {
  std::map<std::uint64_t, const StoredSample*> by_id;
  for (const auto& s : store.samples) by_id[s.id] = &s;

  std::map<std::string, std::pair<std::vector<double>, int>> sums;
  for (auto id : split.train) {
    const auto* s = by_id.at(id);
    auto& [sum, n] = sums[s->label];
    sum.resize(store.dim, 0.0);
    for (std::size_t m = 0; m < store.dim; ++m) sum[m] += s->vector[m];
    ++n;
  }
  std::vector<std::pair<std::string, test::Vec>> centroids;
  for (auto& [label, sn] : sums) {
    test::Vec c(store.dim);
    for (std::size_t m = 0; m < store.dim; ++m) c[m] = static_cast<float>(sn.first[m] / sn.second);
    centroids.emplace_back(label, c);
  }

  OracleMetrics out{};
  std::vector<std::string> truth;
  for (auto id : split.test) {
    const auto* s = by_id.at(id);
    out.predicted.push_back(test::naive_nearest(test::as_double(s->vector), centroids, true));
    truth.push_back(s->label);
  }
  std::set<std::string> labels(truth.begin(), truth.end());
  for (const auto& c : centroids) labels.insert(c.first);
  double p = 0, r = 0, f = 0;
  int correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == out.predicted[i];
  for (const auto& l : labels) {
    int tp = 0, pred = 0, act = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      tp += truth[i] == l && out.predicted[i] == l;
      pred += out.predicted[i] == l;
      act += truth[i] == l;
    }
    const double pl = pred ? static_cast<double>(tp) / pred : 0.0;
    const double rl = act ? static_cast<double>(tp) / act : 0.0;
    p += pl;
    r += rl;
    f += (pl + rl) > 0 ? 2 * pl * rl / (pl + rl) : 0.0;
  }
  const auto k = static_cast<double>(labels.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  out.precision = p / k;
  out.recall = r / k;
  out.f1 = f / k;
  return out;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome synthetic_five_class() {
  Check ck;
  const auto corpus = make_corpus(42);
  for (std::size_t a = 0; a < corpus.centers.size(); ++a)
    for (std::size_t b = a + 1; b < corpus.centers.size(); ++b)
      ck.expect(test::naive_dot(corpus.centers[a], corpus.centers[b]) < 0.3, "center cosine >= 0.3");

  const auto run = run_pipeline(corpus, 0.05, 42);
  const auto& rep = run.result.report;
  const auto oracle = oracle_metrics(run.store, run.result.split);

  ck.expect(rep.accuracy >= 0.99, fmt("accuracy %.4f < 0.99", rep.accuracy));
  ck.expect(rep.precision >= 0.99, fmt("precision %.4f < 0.99", rep.precision));
  ck.expect(rep.recall >= 0.99, fmt("recall %.4f < 0.99", rep.recall));
  ck.expect(rep.f1 >= 0.99, fmt("f1 %.4f < 0.99", rep.f1));
  ck.expect(run.seconds < 5.0, fmt("runtime %.3fs >= 5s", run.seconds));
  ck.expect(run.result.centroids.size() == kSynthClasses, "expected 5 centroids");
  ck.expect(run.result.split.test.size() == kSynthClasses * 8, "expected 8 test docs per class");

  // brute-force oracle agreement
  ck.expect(std::abs(rep.accuracy - oracle.accuracy) <= 1e-12, "accuracy differs from oracle");
  ck.expect(std::abs(rep.precision - oracle.precision) <= 1e-12, "precision differs from oracle");
  ck.expect(std::abs(rep.recall - oracle.recall) <= 1e-12, "recall differs from oracle");
  ck.expect(std::abs(rep.f1 - oracle.f1) <= 1e-12, "f1 differs from oracle");
  std::map<std::pair<std::string, std::string>, std::uint64_t> oracle_cm;
  std::size_t agree = 0;
  const auto& cm = run.result.confusion;
  for (std::size_t i = 0; i < run.result.split.test.size(); ++i) {
    const auto id = run.result.split.test[i];
    const auto& truth = std::find_if(run.store.samples.begin(), run.store.samples.end(),
                                     [&](const StoredSample& s) { return s.id == id; })->label;
    ++oracle_cm[{truth, oracle.predicted[i]}];
  }
  for (std::size_t r = 0; r < cm.size(); ++r) {
    for (std::size_t c = 0; c < cm.size(); ++c) {
      const auto key = std::make_pair(cm.labels()[r], cm.labels()[c]);
      const std::uint64_t want = oracle_cm.count(key) ? oracle_cm.at(key) : 0;
      ck.expect(cm.at(r, c) == want, "confusion cell differs from oracle");
      if (r == c) agree += want;
    }
  }

  return ck.done(fmt("acc=%.4f P=%.4f R=%.4f F1=%.4f (oracle acc=%.4f F1=%.4f, confusion equal, %zu/%zu correct) runtime=%.3fs",
                     rep.accuracy, rep.precision, rep.recall, rep.f1, oracle.accuracy, oracle.f1, agree,
                     run.result.split.test.size(), run.seconds));
}

Outcome degradation_curve() {
  Check ck;
  const auto corpus = make_corpus(42);
  std::vector<double> acc;
  for (double sigma : {0.05, 0.3, 0.6}) {
    const auto run = run_pipeline(corpus, sigma, 42);
    const auto& rep = run.result.report;
    const auto oracle = oracle_metrics(run.store, run.result.split);
    ck.expect(std::abs(rep.accuracy - oracle.accuracy) <= 1e-12 && std::abs(rep.f1 - oracle.f1) <= 1e-12 &&
                  std::abs(rep.precision - oracle.precision) <= 1e-12 && std::abs(rep.recall - oracle.recall) <= 1e-12,
              fmt("sigma %.2f metrics differ from oracle", sigma));
    acc.push_back(rep.accuracy);
  }
  for (std::size_t i = 1; i < acc.size(); ++i) {
    ck.expect(acc[i] <= acc[i - 1], fmt("accuracy rose from %.4f to %.4f", acc[i - 1], acc[i]));
  }
  return ck.done(fmt("sigma 0.05/0.3/0.6 -> accuracy %.4f / %.4f / %.4f, each equal to the brute-force oracle", acc[0], acc[1], acc[2]));
}

Outcome math_kernels() {
  Check ck;
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  const int cases = 2000;
  double worst_scale = 0, worst_unit = 0, worst_tri = 0;
  for (int i = 0; i < cases; ++i) {
    const std::size_t dim = 1 + rng() % 256;
    const auto a = test::random_vector(rng, dim);
    const auto b = test::random_vector(rng, dim);
    const auto c = test::random_vector(rng, dim);

    ck.expect(cosine_similarity(a, b) == cosine_similarity(b, a), "cosine not symmetric");
    ck.expect(l2_distance(a, b) == l2_distance(b, a), "l2 not symmetric");

    const double s = scale(rng);
    const double ds = std::abs(cosine_similarity(a.scaled(s), b) - cosine_similarity(a, b));
    worst_scale = std::max(worst_scale, ds);
    ck.expect(ds <= 1e-6, fmt("scale invariance off by %g", ds));

    const double tri = l2_distance(a, c) - (l2_distance(a, b) + l2_distance(b, c));
    worst_tri = std::max(worst_tri, tri);
    ck.expect(tri <= 1e-6, fmt("triangle inequality violated by %g", tri));

    const auto ua = normalized(a);
    const auto ub = normalized(b);
    const double l2 = l2_distance(ua, ub);
    const double du = std::abs(l2 * l2 - (2.0 - 2.0 * cosine_similarity(ua, ub)));
    worst_unit = std::max(worst_unit, du);
    ck.expect(du <= 1e-5, fmt("unit identity off by %g", du));
  }
  return ck.done(fmt("%d cases; max scale drift %.2e, max unit-identity error %.2e, max triangle excess %.2e", cases,
                     worst_scale, worst_unit, worst_tri));
}

Outcome aggregation_suite() {
  Check ck;
  std::mt19937_64 rng(2002);
  const int cases = 1000;
  double worst_homog = 0.0, worst_out_rel = 0.0;
  for (int t = 0; t < cases; ++t) {
    const std::size_t dim = 1 + rng() % 64;
    const std::size_t n = 1 + rng() % 20;
    std::vector<EmbeddingVector> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back(test::random_vector(rng, dim, -10, 10));

    const auto mean = mean_pool(items);
    const double w = 0.1 + static_cast<double>(rng() % 100);
    const auto uniform = weighted_pool(items, WeightVector(std::vector<double>(n, w)));
    for (std::size_t m = 0; m < dim; ++m) {
      ck.expect(std::abs(uniform[m] - mean[m]) <= 1e-6, "uniform weights differ from mean");
      float lo = items[0][m], hi = items[0][m];
      for (const auto& v : items) {
        lo = std::min(lo, v[m]);
        hi = std::max(hi, v[m]);
      }
      ck.expect(mean[m] >= lo && mean[m] <= hi, "mean outside convex hull");
    }

    // permutation invariance after canonicalizing page order
    std::vector<PageEmbedding> pages;
    for (std::uint32_t i = 0; i < n; ++i) pages.push_back({items[i], i, "doc"});
    const auto ref = build_document_embedding(pages);
    std::shuffle(pages.begin(), pages.end(), rng);
    ck.expect(build_document_embedding(pages) == ref, "document embedding depends on page order");

    // homogeneity
    const double s = 0.5 + static_cast<double>(rng() % 8);
    std::vector<EmbeddingVector> scaled;
    for (const auto& v : items) scaled.push_back(v.scaled(s));
    std::vector<double> ws(n);
    for (auto& x : ws) x = static_cast<double>(rng() % 5);
    ws[0] += 1.0;
    const auto wp = weighted_pool(items, WeightVector(ws));
    const auto wps = weighted_pool(scaled, WeightVector(ws));
    const auto ms = mean_pool(scaled);
    // Relative to the largest scaled input magnitude in that component: the
    // scaled inputs are themselves rounded to float, so near-cancelling
    // components cannot be bounded relative to the output.
    for (std::size_t m = 0; m < dim; ++m) {
      double mag = 0.0;
      for (const auto& v : items) mag = std::max(mag, s * std::abs(static_cast<double>(v[m])));
      mag = std::max(mag, std::numeric_limits<double>::min());
      const double em = std::abs(ms[m] - s * mean[m]) / mag;
      const double ew = std::abs(wps[m] - s * wp[m]) / mag;
      worst_homog = std::max({worst_homog, em, ew});
      const double out_mag = std::max(std::abs(s * mean[m]), std::abs(s * wp[m]));
      if (out_mag > 0) worst_out_rel = std::max(worst_out_rel, std::max(em, ew) * mag / out_mag);
      ck.expect(em <= 1e-6, fmt("mean_pool homogeneity error %g", em));
      ck.expect(ew <= 1e-6, fmt("weighted_pool homogeneity error %g", ew));
    }

    // membership conservation
    std::vector<LabeledDocument> docs;
    for (std::size_t i = 0; i < n; ++i) {
      docs.push_back({{items[i], "d" + std::to_string(i), 1, Aggregation::Mean}, "L" + std::to_string(rng() % 4)});
    }
    std::uint32_t members = 0;
    for (const auto& c : build_class_centroids(docs)) members += c.member_count;
    ck.expect(members == n, "centroid membership not conserved");
  }

  // worked examples
  const std::vector<EmbeddingVector> ex1{{1, 3}, {3, 5}};
  ck.expect(mean_pool(ex1) == EmbeddingVector{2, 4}, "mean of (1,3),(3,5)");
  const std::vector<EmbeddingVector> ex2{{1, 0}, {0, 1}, {1, 1}, {2, 2}};
  ck.expect(mean_pool(ex2) == EmbeddingVector{1, 1}, "mean of four");
  const std::vector<EmbeddingVector> ex3{{1, 1}, {5, 1}};
  ck.expect(weighted_pool(ex3, WeightVector({3, 1})) == EmbeddingVector{2, 1}, "weighted (3,1)");
  const std::vector<PageEmbedding> ex4{{{1, 0}, 0, "d"}, {{0, 1}, 1, "d"}, {{2, 2}, 2, "d"}};
  ck.expect(build_document_embedding(ex4, PageAggregation::weighted(WeightVector({1, 1, 2}))).vector ==
                EmbeddingVector{1.25f, 1.25f},
            "weighted document (1,1,2)");
  const std::vector<LabeledDocument> ex5{{{{0, 0}, "a", 1, Aggregation::Mean}, "A"},
                                         {{{2, 2}, "b", 1, Aggregation::Mean}, "A"},
                                         {{{9, 9}, "c", 1, Aggregation::Mean}, "B"}};
  const auto c5 = build_class_centroids(ex5);
  ck.expect(c5.size() == 2 && c5[0] == ClassCentroid{{1, 1}, "A", 2} && c5[1] == ClassCentroid{{9, 9}, "B", 1},
            "per-class mean example");
  return ck.done(fmt("%d randomized cases + 5 worked examples; homogeneity error %.2e of input scale "
                     "(%.2e of output on near-cancelling components)",
                     cases, worst_homog, worst_out_rel));
}

Outcome classifier_properties() {
  Check ck;
  std::mt19937_64 rng(3003);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  const int cases = 1000;
  for (int t = 0; t < cases; ++t) {
    const std::size_t dim = 2 + rng() % 32;
    std::vector<ClassCentroid> cs;
    const int k = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < k; ++i) cs.push_back({test::random_vector(rng, dim), "c" + std::to_string(i), 1});
    const auto q = test::random_vector(rng, dim);

    const auto base = classify(q, cs, SimilarityMeasure::Cosine);
    const auto scaled = classify(q.scaled(scale(rng)), cs, SimilarityMeasure::Cosine);
    bool same_order = base.ranking.size() == scaled.ranking.size();
    for (std::size_t i = 0; same_order && i < base.ranking.size(); ++i) {
      same_order = base.ranking[i].label == scaled.ranking[i].label;
    }
    ck.expect(same_order && base.predicted_label == scaled.predicted_label, "ranking changed under query scaling");

    std::vector<ClassCentroid> unit;
    for (const auto& c : cs) unit.push_back({normalized(c.vector), c.label, 1});
    const auto uq = normalized(q);
    ck.expect(classify(uq, unit, SimilarityMeasure::Cosine).predicted_label ==
                  classify(uq, unit, SimilarityMeasure::L2).predicted_label,
              "cosine and L2 disagree on unit vectors");

    std::vector<std::pair<std::string, test::Vec>> naive;
    for (const auto& c : cs) naive.emplace_back(c.label, test::as_double(c.vector));
    ck.expect(base.predicted_label == test::naive_nearest(test::as_double(q), naive, true), "cosine vs brute force");
    ck.expect(classify(q, cs, SimilarityMeasure::L2).predicted_label ==
                  test::naive_nearest(test::as_double(q), naive, false),
              "L2 vs brute force");
    ck.expect(classify(q, cs, SimilarityMeasure::Cosine) == base, "nondeterministic result");
  }

  // constructed tie: B and C both at 1/sqrt(2)
  std::string tie_detail;
  for (int perm = 0; perm < 6; ++perm) {
    std::vector<ClassCentroid> cs{{{1, 1}, "A", 1}, {{1, 0}, "B", 1}, {{0, 1}, "C", 1}};
    std::vector<int> idx{0, 1, 2};
    for (int p = 0; p < perm; ++p) std::next_permutation(idx.begin(), idx.end());
    std::vector<ClassCentroid> permuted{cs[idx[0]], cs[idx[1]], cs[idx[2]]};
    const auto r = classify({2, 2}, permuted, SimilarityMeasure::Cosine);
    ck.expect(r.predicted_label == "A" && r.ranking[1].label == "B" && r.ranking[2].label == "C",
              "tie order depends on centroid order");
    ck.expect(std::abs(r.ranking[1].score - 1.0 / std::sqrt(2.0)) < 1e-12 && r.ranking[1].score == r.ranking[2].score,
              "tie scores");
    tie_detail = fmt("tie A=%.4f B=%.4f C=%.4f", r.ranking[0].score, r.ranking[1].score, r.ranking[2].score);
  }
  return ck.done(fmt("%d randomized cases; %s over all 6 centroid orders", cases, tie_detail.c_str()));
}

bool bit_equal(const std::vector<SearchHit>& a, const std::vector<SearchHit>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].label_id != b[i].label_id || a[i].measure != b[i].measure ||
        std::bit_cast<std::uint64_t>(a[i].score) != std::bit_cast<std::uint64_t>(b[i].score)) {
      return false;
    }
  }
  return true;
}

Outcome index_oracle() {
  Check ck;
  // exhaustive probing == flat scan, 1000 random entries
  {
    std::mt19937_64 rng(4004);
    std::vector<EmbeddingVector> vs;
    for (int i = 0; i < 1000; ++i) vs.push_back(test::random_vector(rng, 24));
    auto ivf = IvfFlatIndex::train(vs, 16, 42);
    FlatIndex flat(24);
    for (std::uint64_t i = 0; i < vs.size(); ++i) {
      ivf.add(i, vs[i], static_cast<std::uint32_t>(i % 5));
      flat.add(i, vs[i], static_cast<std::uint32_t>(i % 5));
    }
    for (int q = 0; q < 100; ++q) {
      const auto query = test::random_vector(rng, 24);
      for (auto m : {SimilarityMeasure::Cosine, SimilarityMeasure::L2}) {
        ck.expect(bit_equal(ivf.search(query, 10, 16, m), flat.search(query, 10, m)), "nprobe==nlist differs");
      }
    }
  }

  // recall on 10,000 seeded Gaussian vectors (dim 8, N(0,1)), nlist 16
  constexpr std::size_t dim = 8;
  std::mt19937_64 rng(42);
  std::vector<EmbeddingVector> vs;
  for (int i = 0; i < 10000; ++i) vs.emplace_back(test::gaussian_floats(rng, dim));
  auto ivf = IvfFlatIndex::train(vs, 16, 42);
  FlatIndex flat(dim);
  for (std::uint64_t i = 0; i < vs.size(); ++i) {
    ivf.add(i, vs[i], 0);
    flat.add(i, vs[i], 0);
  }
  std::vector<double> hits(17, 0.0);
  const int nq = 200;
  for (int q = 0; q < nq; ++q) {
    const EmbeddingVector query(test::gaussian_floats(rng, dim));
    const auto truth = flat.search(query, 10, SimilarityMeasure::L2);
    double prev = 0.0;
    for (std::size_t nprobe = 1; nprobe <= 16; ++nprobe) {
      const double r = recall_at_k(truth, ivf.search(query, 10, nprobe, SimilarityMeasure::L2));
      ck.expect(r >= prev, "per-query recall decreased with nprobe");
      prev = r;
      hits[nprobe] += r;
    }
  }
  std::vector<double> recall(17, 0.0);
  for (std::size_t nprobe = 1; nprobe <= 16; ++nprobe) recall[nprobe] = hits[nprobe] / nq;
  for (std::size_t nprobe = 2; nprobe <= 16; ++nprobe) {
    ck.expect(recall[nprobe] >= recall[nprobe - 1], "mean recall decreased with nprobe");
  }
  ck.expect(recall[4] >= 0.9, fmt("recall@10 at nprobe 4/16 is %.4f < 0.9", recall[4]));
  ck.expect(recall[16] == 1.0, "recall at nprobe == nlist is not 1");
  return ck.done(fmt("exhaustive probe bit-equal on 1000 entries; recall@10 nprobe 1/2/4/8/16 = %.3f/%.3f/%.3f/%.3f/%.3f",
                     recall[1], recall[2], recall[4], recall[8], recall[16]));
}

Outcome feds_round_trip() {
  Check ck;
  test::TempDir dir;
  std::mt19937_64 rng(5005);
  const int stores = 100;
  for (int t = 0; t < stores; ++t) {
    const std::uint32_t dim = 1 + static_cast<std::uint32_t>(rng() % 32);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < 1 + rng() % 6; ++i) labels.push_back("label-" + std::to_string(rng() % 50));
    std::set<std::uint64_t> ids;
    std::vector<StoredSample> samples;
    for (std::size_t i = 0; i < rng() % 80; ++i) {
      const auto id = rng() % 100000;
      if (ids.insert(id).second) samples.push_back({id, labels[rng() % labels.size()], test::random_vector(rng, dim, -1e3, 1e3)});
    }
    std::set<std::string> uniq(labels.begin(), labels.end());
    std::vector<ClassCentroid> centroids;
    for (const auto& l : uniq) centroids.push_back({test::random_vector(rng, dim), l, static_cast<std::uint32_t>(1 + rng() % 40)});

    write_store(dir / "a.feds", dim, std::span<const StoredSample>(samples), centroids);
    const auto back = read_store(dir / "a.feds");
    auto want = samples;
    std::sort(want.begin(), want.end(), [](auto& a, auto& b) { return a.id < b.id; });
    ck.expect(back.samples == want && back.centroids == centroids && back.dim == dim, "round trip lost data");

    std::shuffle(samples.begin(), samples.end(), rng);
    std::shuffle(centroids.begin(), centroids.end(), rng);
    write_store(dir / "b.feds", dim, std::span<const StoredSample>(samples), centroids);
    ck.expect(feds::read_bytes(dir / "a.feds") == feds::read_bytes(dir / "b.feds"), "non-canonical bytes");
  }

  // corruption: one flipped byte per trial
  std::vector<StoredSample> samples;
  for (std::uint64_t i = 0; i < 60; ++i) samples.push_back({i, "c" + std::to_string(i % 5), test::random_vector(rng, 16)});
  std::vector<ClassCentroid> centroids;
  for (int c = 0; c < 5; ++c) centroids.push_back({test::random_vector(rng, 16), "c" + std::to_string(c), 12});
  const auto clean = encode_store(16, samples, centroids);
  std::map<std::string, int> codes;
  int crc_caught = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    auto bytes = clean;
    const std::size_t pos = rng() % bytes.size();
    bytes[pos] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    const auto body = std::span<const std::uint8_t>(bytes).first(bytes.size() - 4);
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
    crc_caught += feds::crc32(body) != stored;
    try {
      decode_store(bytes);
      ck.expect(false, fmt("flip at offset %zu went undetected", pos));
    } catch (const Error& e) {
      ++codes[std::string(to_string(e.code()))];
    }
  }
  ck.expect(crc_caught == trials, fmt("CRC caught only %d of %d flips", crc_caught, trials));
  std::string breakdown;
  for (const auto& [name, n] : codes) breakdown += (breakdown.empty() ? "" : ", ") + name + "=" + std::to_string(n);
  return ck.done(fmt("%d random stores round-trip canonically; %d/%d flips fail CRC and are rejected (%s)", stores,
                     crc_caught, trials, breakdown.c_str()));
}

Outcome metrics_oracle() {
  Check ck;
  std::mt19937_64 rng(6006);
  const int cases = 500;
  double worst = 0.0;
  for (int t = 0; t < cases; ++t) {
    const std::size_t k = 2 + rng() % 8;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back("L" + std::to_string(i));
    ConfusionMatrix cm(labels);
    std::vector<std::vector<double>> raw(k, std::vector<double>(k));
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        const std::uint64_t n = rng() % 4 == 0 ? 0 : rng() % 50;
        cm.set(r, c, n);
        raw[r][c] = static_cast<double>(n);
      }
    }
    if (cm.total() == 0) cm.set(0, 0, 1), raw[0][0] = 1;

    // naive loop oracle
    double total = 0, trace = 0, sp = 0, sr = 0, sf = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double tp = raw[i][i], col = 0, row = 0;
      for (std::size_t j = 0; j < k; ++j) {
        col += raw[j][i];
        row += raw[i][j];
        total += raw[i][j];
      }
      trace += tp;
      const double p = col > 0 ? tp / col : 0.0;
      const double r = row > 0 ? tp / row : 0.0;
      sp += p;
      sr += r;
      sf += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
    }
    const auto macro = compute_metrics(cm, Averaging::Macro);
    const auto micro = compute_metrics(cm, Averaging::Micro);
    const double kd = static_cast<double>(k);
    for (double d : {macro.accuracy - trace / total, macro.precision - sp / kd, macro.recall - sr / kd,
                     macro.f1 - sf / kd, micro.precision - trace / total, micro.recall - trace / total}) {
      worst = std::max(worst, std::abs(d));
      ck.expect(std::abs(d) <= 1e-12, fmt("metric differs from oracle by %g", std::abs(d)));
    }
    ck.expect(micro.precision == micro.accuracy && micro.recall == micro.accuracy, "micro identity");
  }

  ConfusionMatrix cm({"c0", "c1"});
  cm.set(0, 0, 8);
  cm.set(0, 1, 2);
  cm.set(1, 0, 3);
  cm.set(1, 1, 7);
  const auto rep = compute_metrics(cm);
  auto r4 = [](double x) { return std::round(x * 1e4) / 1e4; };
  ck.expect(r4(rep.accuracy) == 0.75, "accuracy");
  ck.expect(r4(rep.per_class.at("c0").precision) == 0.7273, "c0 precision");
  ck.expect(r4(rep.per_class.at("c0").recall) == 0.8, "c0 recall");
  ck.expect(r4(rep.per_class.at("c1").precision) == 0.7778, "c1 precision");
  ck.expect(r4(rep.per_class.at("c1").recall) == 0.7, "c1 recall");
  ck.expect(r4(rep.f1) == 0.7494, fmt("macro F1 %.6f", rep.f1));
  return ck.done(fmt("%d random matrices, max deviation %.1e; [[8,2],[3,7]] macro-F1 = %.4f", cases, worst, rep.f1));
}

Outcome mock_cross_check() {
  Check ck;
  // frozen from tests/oracles/mock_embed_oracle.py abc "" 4
  const std::vector<std::uint8_t> abc{'a', 'b', 'c'};
  const std::uint64_t seed = mock_seed(abc, std::nullopt);
  ck.expect(seed == 0xbd144907cd1411dcULL, fmt("seed 0x%016llx", static_cast<unsigned long long>(seed)));
  const std::uint64_t raw[] = {0xb3e370a43deba847ULL, 0xea5aacd67593c330ULL, 0x8ae09af5183b5607ULL,
                               0xbe34ae58deb1e7f5ULL};
  SplitMix64 rng(seed);
  for (auto want : raw) ck.expect(rng.next() == want, "u64 stream differs");
  const double ref[] = {0.3868449032306671, 0.7929045557975769, 0.08109423518180847, 0.4637640416622162};
  const auto v = mock_embed(abc, std::nullopt, 4);
  for (int i = 0; i < 4; ++i) ck.expect(std::abs(v[i] - ref[i]) <= 1e-6, "float mapping differs");
  return ck.done(fmt("seed 0x%016llx, 4 u64 draws bit-equal, vector (%.6f, %.6f, %.6f, %.6f)",
                     static_cast<unsigned long long>(seed), v[0], v[1], v[2], v[3]));
}

Outcome split_proportions() {
  Check ck;
  std::mt19937_64 rng(7007);
  const SplitSpec spec{0.7, 0.1, 0.2, 42};
  int classes_checked = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<IdLabel> samples;
    std::map<std::string, std::size_t> sizes;
    std::uint64_t id = 0;
    for (int c = 0; c < 1 + static_cast<int>(rng() % 6); ++c) {
      const std::size_t n = 10 + rng() % 200;
      const std::string label = "class" + std::to_string(c);
      sizes[label] = n;
      for (std::size_t i = 0; i < n; ++i) samples.push_back({id++, label});
    }
    std::shuffle(samples.begin(), samples.end(), rng);
    const auto split = stratified_split(samples, SplitSpec{0.7, 0.1, 0.2, rng()});
    std::map<std::uint64_t, std::string> label_of;
    for (const auto& s : samples) label_of[s.id] = s.label;
    std::map<std::string, std::array<std::size_t, 3>> counts;
    std::set<std::uint64_t> seen;
    const std::vector<std::uint64_t>* parts[3] = {&split.train, &split.val, &split.test};
    for (int p = 0; p < 3; ++p) {
      for (auto i : *parts[p]) {
        ck.expect(seen.insert(i).second, "id in two splits");
        ++counts[label_of.at(i)][p];
      }
    }
    ck.expect(seen.size() == samples.size(), "split not exhaustive");
    for (const auto& [label, n] : sizes) {
      const auto& c = counts[label];
      const double target[3] = {0.7 * n, 0.1 * n, 0.2 * n};
      for (int p = 0; p < 3; ++p) {
        ck.expect(std::abs(static_cast<double>(c[p]) - target[p]) <= 1.0,
                  fmt("class of %zu: split %d has %zu, target %.1f", n, p, c[p], target[p]));
      }
      ++classes_checked;
    }
  }
  const auto ten = stratified_split(std::vector<IdLabel>{{0, "a"}, {1, "a"}, {2, "a"}, {3, "a"}, {4, "a"},
                                                          {5, "a"}, {6, "a"}, {7, "a"}, {8, "a"}, {9, "a"}},
                                    spec);
  ck.expect(ten.train.size() == 7 && ten.val.size() == 1 && ten.test.size() == 2, "10 samples -> 7/1/2");
  return ck.done(fmt("%d classes within +/-1 of 70/10/20, splits disjoint; 10 samples -> %zu/%zu/%zu",
                     classes_checked, ten.train.size(), ten.val.size(), ten.test.size()));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"synthetic 5-class experiment", synthetic_five_class},
      {"degradation curve", degradation_curve},
      {"math-kernel invariants", math_kernels},
      {"aggregation invariants", aggregation_suite},
      {"classifier invariance and tie-break", classifier_properties},
      {"index oracle equivalence and recall", index_oracle},
      {"FEDS round-trip and corruption", feds_round_trip},
      {"metrics oracle", metrics_oracle},
      {"mock-embedder cross-check", mock_cross_check},
      {"split proportions", split_proportions},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
