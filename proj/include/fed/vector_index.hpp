#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "fed/embedding.hpp"

namespace fed {

struct IndexEntry {
  std::uint64_t id = 0;
  EmbeddingVector vector;
  std::uint32_t label_id = 0;
};

/// Hits are ordered best first; equal scores order by ascending id.
struct SearchHit {
  std::uint64_t id = 0;
  std::uint32_t label_id = 0;
  double score = 0.0;
  SimilarityMeasure measure = SimilarityMeasure::Cosine;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

/// Exhaustive scan. Serves as the exact oracle for the IVF path.
class FlatIndex {
 public:
  explicit FlatIndex(std::size_t dim);

  void add(std::uint64_t id, EmbeddingVector vector, std::uint32_t label_id);

  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k, SimilarityMeasure measure) const;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const IndexEntry> entries() const noexcept { return entries_; }

 private:
  std::size_t dim_;
  std::vector<IndexEntry> entries_;
  std::unordered_set<std::uint64_t> ids_;
};

/// Lloyd's k-means result used as the IVF coarse quantizer.
struct KMeansResult {
  std::vector<EmbeddingVector> centroids;
  std::vector<std::uint32_t> assignment;
  int iterations = 0;
};

inline constexpr int kKMeansMaxIterations = 25;

/// Seeded Lloyd's k-means under L2: init from `k` distinct sampled inputs,
/// at most kKMeansMaxIterations rounds, stops early when no assignment changes.
/// An emptied cluster is re-seeded with the point farthest from its centroid.
KMeansResult kmeans(std::span<const EmbeddingVector> vectors, std::size_t k, std::uint64_t seed);

/// Index of the nearest centroid by L2; ties go to the lowest index.
std::uint32_t nearest_centroid(std::span<const EmbeddingVector> centroids, std::span<const float> v) noexcept;

/// Inverted file over raw vectors. Concurrent const access is safe; train/add
/// need exclusive access.
class IvfFlatIndex {
 public:
  IvfFlatIndex() = default;

  /// Trains the coarse quantizer; the returned index is empty.
  static IvfFlatIndex train(std::span<const EmbeddingVector> vectors, std::size_t nlist, std::uint64_t seed);

  /// Builds an index directly from known coarse centroids.
  static IvfFlatIndex from_centroids(std::vector<EmbeddingVector> centroids);

  void add(std::uint64_t id, EmbeddingVector vector, std::uint32_t label_id);

  std::vector<SearchHit> search(const EmbeddingVector& query, std::size_t k, std::size_t nprobe,
                                SimilarityMeasure measure) const;

  bool trained() const noexcept { return trained_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t nlist() const noexcept { return centroids_.size(); }
  std::size_t size() const noexcept { return ids_.size(); }
  std::span<const EmbeddingVector> centroids() const noexcept { return centroids_; }
  std::span<const IndexEntry> partition(std::size_t p) const { return partitions_.at(p); }

 private:
  std::size_t dim_ = 0;
  bool trained_ = false;
  std::vector<EmbeddingVector> centroids_;
  std::vector<std::vector<IndexEntry>> partitions_;
  std::unordered_set<std::uint64_t> ids_;
};

/// Fraction of `truth` ids present in `approx` (truth must be nonempty).
double recall_at_k(std::span<const SearchHit> truth, std::span<const SearchHit> approx);

/// Persists an IVF index in a FEDS container: entries in the samples section,
/// coarse centroids in the centroid section (label_id = partition number,
/// member_count = partition size) and the id -> partition map in section 3.
void save_ivf_index(const std::filesystem::path& path, const IvfFlatIndex& index,
                    std::span<const std::string> label_table);

struct LoadedIvfIndex {
  IvfFlatIndex index;
  std::vector<std::string> label_table;
};

LoadedIvfIndex load_ivf_index(const std::filesystem::path& path);

}  // namespace fed
