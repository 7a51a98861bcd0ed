#include "fed/classifier.hpp"

#include <algorithm>
#include <set>
#include <thread>

namespace fed {

ClassificationResult classify(const EmbeddingVector& query, std::span<const ClassCentroid> centroids,
                              SimilarityMeasure measure) {
  if (centroids.empty()) throw Error(ErrorCode::NoClasses, "no class centroids to compare against");

  std::set<std::string_view> seen;
  ClassificationResult out;
  out.measure = measure;
  out.query_dim = query.dim();
  out.ranking.reserve(centroids.size());
  for (const auto& c : centroids) {
    if (!seen.insert(c.label).second) throw Error(ErrorCode::DuplicateLabel, "label '" + c.label + "' repeated");
    if (c.vector.dim() != query.dim()) {
      throw Error(ErrorCode::DimensionMismatch, "centroid '" + c.label + "' has dim " +
                                                    std::to_string(c.vector.dim()) + ", query has " +
                                                    std::to_string(query.dim()));
    }
    out.ranking.push_back({c.label, score(measure, query, c.vector)});
  }

  const bool desc = higher_is_better(measure);
  std::sort(out.ranking.begin(), out.ranking.end(), [desc](const RankedClass& a, const RankedClass& b) {
    if (a.score != b.score) return desc ? a.score > b.score : a.score < b.score;
    return a.label < b.label;
  });
  out.predicted_label = out.ranking.front().label;
  return out;
}

std::vector<BatchEntry> classify_batch(std::span<const BatchQuery> queries,
                                       std::span<const ClassCentroid> centroids, SimilarityMeasure measure,
                                       unsigned parallelism) {
  std::vector<BatchEntry> out(queries.size());

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i].doc_id = queries[i].doc_id;
      try {
        out[i].result = classify(queries[i].vector, centroids, measure);
      } catch (const Error& e) {
        out[i].error = BatchError{e.code(), e.what()};
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, parallelism), queries.size());
  if (workers <= 1) {
    run_range(0, queries.size());
    return out;
  }
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (queries.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(queries.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
  }  // joins
  return out;
}

}  // namespace fed
