#include "fed/vector_index.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "fed/random.hpp"
#include "fed/store.hpp"

namespace fed {

namespace {

void check_dim(std::size_t expected, const EmbeddingVector& v) {
  if (v.dim() != expected) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected dim " + std::to_string(expected) + ", got " + std::to_string(v.dim()));
  }
}

bool hit_before(const SearchHit& a, const SearchHit& b) {
  if (a.score != b.score) return higher_is_better(a.measure) ? a.score > b.score : a.score < b.score;
  return a.id < b.id;
}

void take_top_k(std::vector<SearchHit>& hits, std::size_t k) {
  const std::size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(), hit_before);
  hits.resize(n);
}

void check_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::BadK, "k must be positive");
}

void scan(std::span<const IndexEntry> entries, const EmbeddingVector& query, SimilarityMeasure measure,
          std::vector<SearchHit>& out) {
  for (const auto& e : entries) out.push_back({e.id, e.label_id, score(measure, query, e.vector), measure});
}

EmbeddingVector mean_of(std::span<const EmbeddingVector> vectors, std::span<const std::uint32_t> assignment,
                        std::uint32_t cluster, std::size_t dim) {
  std::vector<double> acc(dim, 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (assignment[i] != cluster) continue;
    const auto v = vectors[i].values();
    for (std::size_t m = 0; m < dim; ++m) acc[m] += v[m];
    ++n;
  }
  std::vector<float> out(dim);
  for (std::size_t m = 0; m < dim; ++m) out[m] = static_cast<float>(acc[m] / static_cast<double>(n));
  return EmbeddingVector(std::move(out));
}

}  // namespace

FlatIndex::FlatIndex(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "index dim must be positive");
}

void FlatIndex::add(std::uint64_t id, EmbeddingVector vector, std::uint32_t label_id) {
  check_dim(dim_, vector);
  if (!ids_.insert(id).second) throw Error(ErrorCode::DuplicateId, "id " + std::to_string(id));
  entries_.push_back({id, std::move(vector), label_id});
}

std::vector<SearchHit> FlatIndex::search(const EmbeddingVector& query, std::size_t k,
                                         SimilarityMeasure measure) const {
  check_k(k);
  check_dim(dim_, query);
  std::vector<SearchHit> hits;
  hits.reserve(entries_.size());
  scan(entries_, query, measure, hits);
  take_top_k(hits, k);
  return hits;
}

std::uint32_t nearest_centroid(std::span<const EmbeddingVector> centroids, std::span<const float> v) noexcept {
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::uint32_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_l2_distance(centroids[c].values(), v);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorCode::BadNlist, "nlist must be positive");
  if (vectors.size() < k) {
    throw Error(ErrorCode::TooFewVectors, std::to_string(vectors.size()) + " vectors for " + std::to_string(k) +
                                              " clusters");
  }
  const std::size_t dim = vectors.front().dim();
  for (const auto& v : vectors) check_dim(dim, v);
  const std::size_t n = vectors.size();

  // partial Fisher-Yates: the first k slots are a uniform sample without replacement
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }

  KMeansResult res;
  res.centroids.reserve(k);
  for (std::size_t i = 0; i < k; ++i) res.centroids.push_back(vectors[idx[i]]);

  auto assign_all = [&](std::vector<std::uint32_t>& out) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = nearest_centroid(res.centroids, vectors[i].values());
  };

  assign_all(res.assignment);
  std::vector<std::uint32_t> next;
  for (int it = 0; it < kKMeansMaxIterations; ++it) {
    std::vector<std::size_t> counts(k, 0);
    for (auto a : res.assignment) ++counts[a];

    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) res.centroids[c] = mean_of(vectors, res.assignment, c, dim);
    }

    std::vector<bool> reseeded(n, false);
    for (std::uint32_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (reseeded[i] || counts[res.assignment[i]] <= 1) continue;
        const double d = squared_l2_distance(vectors[i].values(), res.centroids[res.assignment[i]].values());
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) continue;  // every remaining point is a singleton
      reseeded[far] = true;
      --counts[res.assignment[far]];
      res.assignment[far] = c;
      counts[c] = 1;
      res.centroids[c] = vectors[far];
    }

    ++res.iterations;
    assign_all(next);
    if (next == res.assignment) break;
    res.assignment.swap(next);
  }
  return res;
}

IvfFlatIndex IvfFlatIndex::train(std::span<const EmbeddingVector> vectors, std::size_t nlist, std::uint64_t seed) {
  if (nlist == 0) throw Error(ErrorCode::BadNlist, "nlist must be positive");
  if (vectors.empty()) throw Error(ErrorCode::TooFewVectors, "no training vectors");
  return from_centroids(kmeans(vectors, nlist, seed).centroids);
}

IvfFlatIndex IvfFlatIndex::from_centroids(std::vector<EmbeddingVector> centroids) {
  if (centroids.empty()) throw Error(ErrorCode::BadNlist, "nlist must be positive");
  IvfFlatIndex ix;
  ix.dim_ = centroids.front().dim();
  for (const auto& c : centroids) check_dim(ix.dim_, c);
  ix.partitions_.resize(centroids.size());
  ix.centroids_ = std::move(centroids);
  ix.trained_ = true;
  return ix;
}

void IvfFlatIndex::add(std::uint64_t id, EmbeddingVector vector, std::uint32_t label_id) {
  if (!trained_) throw Error(ErrorCode::NotTrained, "add before train");
  check_dim(dim_, vector);
  if (!ids_.insert(id).second) throw Error(ErrorCode::DuplicateId, "id " + std::to_string(id));
  const auto p = nearest_centroid(centroids_, vector.values());
  partitions_[p].push_back({id, std::move(vector), label_id});
}

std::vector<SearchHit> IvfFlatIndex::search(const EmbeddingVector& query, std::size_t k, std::size_t nprobe,
                                            SimilarityMeasure measure) const {
  if (!trained_) throw Error(ErrorCode::NotTrained, "search before train");
  check_k(k);
  check_dim(dim_, query);
  if (nprobe == 0 || nprobe > centroids_.size()) {
    throw Error(ErrorCode::BadNprobe,
                "nprobe " + std::to_string(nprobe) + " outside [1, " + std::to_string(centroids_.size()) + "]");
  }

  std::vector<std::pair<double, std::uint32_t>> coarse(centroids_.size());
  for (std::uint32_t p = 0; p < centroids_.size(); ++p) {
    coarse[p] = {squared_l2_distance(centroids_[p].values(), query.values()), p};
  }
  std::partial_sort(coarse.begin(), coarse.begin() + static_cast<std::ptrdiff_t>(nprobe), coarse.end());

  std::size_t scanned = 0;
  for (std::size_t i = 0; i < nprobe; ++i) scanned += partitions_[coarse[i].second].size();
  std::vector<SearchHit> hits;
  hits.reserve(scanned);
  for (std::size_t i = 0; i < nprobe; ++i) scan(partitions_[coarse[i].second], query, measure, hits);
  take_top_k(hits, k);
  return hits;
}

double recall_at_k(std::span<const SearchHit> truth, std::span<const SearchHit> approx) {
  if (truth.empty()) throw Error(ErrorCode::EmptyInput, "empty ground truth");
  std::unordered_set<std::uint64_t> found;
  for (const auto& h : approx) found.insert(h.id);
  std::size_t hit = 0;
  for (const auto& h : truth) hit += found.count(h.id);
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

void save_ivf_index(const std::filesystem::path& path, const IvfFlatIndex& index,
                    std::span<const std::string> label_table) {
  if (!index.trained()) throw Error(ErrorCode::NotTrained, "cannot save an untrained index");
  feds::File f;
  f.dim = static_cast<std::uint32_t>(index.dim());
  f.label_table.assign(label_table.begin(), label_table.end());
  for (std::uint32_t p = 0; p < index.nlist(); ++p) {
    const auto part = index.partition(p);
    const auto cv = index.centroids()[p].values();
    f.centroids.push_back({p, static_cast<std::uint32_t>(part.size()), {cv.begin(), cv.end()}});
    for (const auto& e : part) {
      if (e.label_id >= label_table.size()) {
        throw Error(ErrorCode::BadLabelRef, "entry " + std::to_string(e.id) + " has label_id " +
                                                std::to_string(e.label_id));
      }
      const auto v = e.vector.values();
      f.samples.push_back({e.id, e.label_id, {v.begin(), v.end()}});
      f.assignments.push_back({e.id, p});
    }
  }
  std::sort(f.samples.begin(), f.samples.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::sort(f.assignments.begin(), f.assignments.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  feds::write_bytes_atomic(path, feds::encode(f));
}

LoadedIvfIndex load_ivf_index(const std::filesystem::path& path) {
  feds::File f = feds::decode(feds::read_bytes(path));
  if (f.centroids.empty()) throw Error(ErrorCode::NotTrained, "file holds no coarse centroids");

  std::vector<EmbeddingVector> coarse(f.centroids.size());
  std::vector<bool> present(f.centroids.size(), false);
  for (auto& c : f.centroids) {
    if (c.label_id >= coarse.size() || present[c.label_id]) {
      throw Error(ErrorCode::BadLabelRef, "bad partition number " + std::to_string(c.label_id));
    }
    present[c.label_id] = true;
    coarse[c.label_id] = EmbeddingVector(std::move(c.vector));
  }

  std::map<std::uint64_t, std::uint32_t> partition_of;
  for (const auto& a : f.assignments) {
    if (a.partition >= coarse.size()) {
      throw Error(ErrorCode::BadLabelRef, "assignment to partition " + std::to_string(a.partition));
    }
    if (!partition_of.emplace(a.id, a.partition).second) {
      throw Error(ErrorCode::DuplicateId, "id " + std::to_string(a.id) + " assigned twice");
    }
  }
  if (partition_of.size() != f.samples.size()) {
    throw Error(ErrorCode::BadLabelRef, "assignment count does not match sample count");
  }

  LoadedIvfIndex out{IvfFlatIndex::from_centroids(std::move(coarse)), std::move(f.label_table)};
  for (auto& s : f.samples) {
    if (s.label_id >= out.label_table.size()) {
      throw Error(ErrorCode::BadLabelRef, "sample " + std::to_string(s.id) + " label " + std::to_string(s.label_id));
    }
    const auto it = partition_of.find(s.id);
    if (it == partition_of.end()) throw Error(ErrorCode::BadLabelRef, "sample " + std::to_string(s.id) + " unassigned");
    EmbeddingVector v(std::move(s.vector));
    if (nearest_centroid(out.index.centroids(), v.values()) != it->second) {
      throw Error(ErrorCode::BadLabelRef, "sample " + std::to_string(s.id) + " stored in the wrong partition");
    }
    out.index.add(s.id, std::move(v), s.label_id);
  }
  return out;
}

}  // namespace fed
