#include "fed/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace fed {

namespace {

std::size_t common_dim(std::span<const EmbeddingVector> items) {
  if (items.empty()) throw Error(ErrorCode::EmptyInput, "nothing to aggregate");
  const std::size_t dim = items.front().dim();
  for (const auto& v : items) {
    if (v.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "expected dim " + std::to_string(dim) + ", got " + std::to_string(v.dim()));
    }
  }
  return dim;
}

}  // namespace

std::string_view to_string(Aggregation a) noexcept { return a == Aggregation::Mean ? "mean" : "weighted"; }

Aggregation parse_aggregation(std::string_view text) {
  if (text == "mean") return Aggregation::Mean;
  if (text == "weighted") return Aggregation::Weighted;
  throw Error(ErrorCode::InvalidArgument, "unknown aggregation '" + std::string(text) + "'");
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::InvalidWeight, "weights must be finite and nonnegative");
    }
  }
}

EmbeddingVector mean_pool(std::span<const EmbeddingVector> items) {
  const std::size_t dim = common_dim(items);
  std::vector<double> acc(dim, 0.0);
  for (const auto& v : items) {
    const auto vals = v.values();
    for (std::size_t m = 0; m < dim; ++m) acc[m] += vals[m];
  }
  const double n = static_cast<double>(items.size());
  std::vector<float> out(dim);
  for (std::size_t m = 0; m < dim; ++m) out[m] = static_cast<float>(acc[m] / n);
  return EmbeddingVector(std::move(out));
}

EmbeddingVector weighted_pool(std::span<const EmbeddingVector> items, const WeightVector& weights) {
  const std::size_t dim = common_dim(items);
  if (weights.size() != items.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(weights.size()) + " weights for " +
                                               std::to_string(items.size()) + " items");
  }
  double total = 0.0;
  for (double w : weights.values()) total += w;
  if (!(total > 0.0)) throw Error(ErrorCode::AllZeroWeights, "weights sum to zero");

  std::vector<double> acc(dim, 0.0);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto vals = items[i].values();
    const double w = weights[i];
    for (std::size_t m = 0; m < dim; ++m) acc[m] += w * vals[m];
  }
  std::vector<float> out(dim);
  for (std::size_t m = 0; m < dim; ++m) out[m] = static_cast<float>(acc[m] / total);
  return EmbeddingVector(std::move(out));
}

DocumentEmbedding build_document_embedding(std::span<const PageEmbedding> pages,
                                           const PageAggregation& mode) {
  if (pages.empty()) throw Error(ErrorCode::EmptyInput, "document has no pages");
  const std::string& doc_id = pages.front().source_id;

  std::vector<std::size_t> order(pages.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pages[a].page_index < pages[b].page_index;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& p = pages[order[i]];
    if (p.source_id != doc_id) {
      throw Error(ErrorCode::MixedDocuments, "pages from '" + doc_id + "' and '" + p.source_id + "'");
    }
    if (i > 0 && pages[order[i - 1]].page_index == p.page_index) {
      throw Error(ErrorCode::DuplicatePage,
                  "page " + std::to_string(p.page_index) + " repeated in '" + doc_id + "'");
    }
  }

  std::vector<EmbeddingVector> vectors;
  vectors.reserve(pages.size());
  for (std::size_t i : order) vectors.push_back(pages[i].vector);

  DocumentEmbedding doc;
  doc.doc_id = doc_id;
  doc.page_count = static_cast<std::uint32_t>(pages.size());
  doc.aggregation = mode.kind;
  if (mode.kind == Aggregation::Mean) {
    doc.vector = mean_pool(vectors);
  } else {
    if (!mode.weights) throw Error(ErrorCode::MissingWeight, "weighted mode without page weights");
    if (mode.weights->size() != pages.size()) {
      throw Error(ErrorCode::LengthMismatch, std::to_string(mode.weights->size()) + " weights for " +
                                                 std::to_string(pages.size()) + " pages");
    }
    std::vector<double> w;
    w.reserve(order.size());
    for (std::size_t i : order) w.push_back((*mode.weights)[i]);
    doc.vector = weighted_pool(vectors, WeightVector(std::move(w)));
  }
  return doc;
}

std::vector<ClassCentroid> build_class_centroids(std::span<const LabeledDocument> samples,
                                                 const CentroidAggregation& mode) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no labeled documents");
  const std::size_t dim = samples.front().document.vector.dim();

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].document.vector.dim() != dim) {
      throw Error(ErrorCode::DimensionMismatch, "document '" + samples[i].document.doc_id +
                                                    "' has dim " +
                                                    std::to_string(samples[i].document.vector.dim()));
    }
    groups[samples[i].label].push_back(i);
  }

  std::vector<ClassCentroid> out;
  out.reserve(groups.size());
  for (const auto& [label, members] : groups) {
    std::vector<EmbeddingVector> vectors;
    vectors.reserve(members.size());
    for (std::size_t i : members) vectors.push_back(samples[i].document.vector);

    ClassCentroid c;
    c.label = label;
    c.member_count = static_cast<std::uint32_t>(members.size());
    if (mode.kind == Aggregation::Mean) {
      c.vector = mean_pool(vectors);
    } else {
      std::vector<double> w;
      w.reserve(members.size());
      for (std::size_t i : members) {
        const auto it = mode.doc_weights.find(samples[i].document.doc_id);
        if (it == mode.doc_weights.end()) {
          throw Error(ErrorCode::MissingWeight, "no weight for document '" + samples[i].document.doc_id + "'");
        }
        w.push_back(it->second);
      }
      c.vector = weighted_pool(vectors, WeightVector(std::move(w)));
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace fed
