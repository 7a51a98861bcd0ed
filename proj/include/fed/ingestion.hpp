#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fed/aggregation.hpp"
#include "fed/embedding.hpp"

namespace fed {

struct PagePayload {
  std::string doc_id;
  std::uint32_t page_index = 0;
  std::vector<std::uint8_t> content;  // rendered page bytes
  std::optional<std::string> text_hint;
};

/// Source of page embeddings. Implementations must be safe to call from
/// several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;

  /// Raw provider call; embed_page validates what comes back.
  virtual std::vector<float> embed(std::span<const std::uint8_t> content,
                                   const std::optional<std::string>& text_hint) const = 0;
};

/// Deterministic stand-in for a real model.
///
/// seed   = first 8 bytes (little-endian) of SHA-256(content || 0x00 || hint)
/// values = dim draws of splitmix64(seed), each mapped to (x >> 11) * 2^-53 * 2 - 1
/// result = values / ||values||, rounded to float
EmbeddingVector mock_embed(std::span<const std::uint8_t> content, const std::optional<std::string>& text_hint,
                           std::size_t dim);

/// The 64-bit seed mock_embed derives from its inputs.
std::uint64_t mock_seed(std::span<const std::uint8_t> content, const std::optional<std::string>& text_hint);

class MockProvider final : public EmbeddingProvider {
 public:
  explicit MockProvider(std::size_t dim);
  std::string name() const override { return "mock"; }
  std::size_t dim() const override { return dim_; }
  std::vector<float> embed(std::span<const std::uint8_t> content,
                           const std::optional<std::string>& text_hint) const override;

 private:
  std::size_t dim_;
};

/// Client for the embedding sidecar: POST {url}/embed with
/// {"content_b64", "text_hint", "dim"}, expects {"vector": [...], "model": str}.
class HttpProvider final : public EmbeddingProvider {
 public:
  HttpProvider(std::string url, std::size_t dim, int retries = 1, int timeout_seconds = 30);
  std::string name() const override { return "http:" + url_; }
  std::size_t dim() const override { return dim_; }
  std::vector<float> embed(std::span<const std::uint8_t> content,
                           const std::optional<std::string>& text_hint) const override;

 private:
  std::string url_;
  std::string host_;  // scheme://host:port
  std::string path_;  // prefix + "/embed"
  std::size_t dim_;
  int retries_;
  int timeout_seconds_;
};

/// Request body the HTTP provider sends (compact JSON, keys sorted).
std::string build_embed_request(std::span<const std::uint8_t> content, const std::optional<std::string>& text_hint,
                                std::size_t dim);

/// Parses a 200 response body. Throws ProviderBadResponse on malformed JSON,
/// a wrong-length vector or non-finite values.
std::vector<float> parse_embed_response(std::string_view body, std::size_t dim);

std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Embeds one page and checks the provider contract (length == dim, finite).
PageEmbedding embed_page(const EmbeddingProvider& provider, const PagePayload& payload);

struct ProviderDescriptor {
  std::string kind = "mock";  // "mock" | "http"
  std::string url;
  int retries = 1;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderDescriptor& desc, std::size_t dim);

/// A page is either a rendered file on disk or an already computed vector.
struct PageLocator {
  std::uint32_t page_index = 0;
  std::optional<std::filesystem::path> path;
  std::optional<std::vector<float>> vector;
  std::optional<std::string> text_hint;
};

struct ManifestDocument {
  std::string doc_id;
  std::optional<std::string> label;
  std::vector<PageLocator> pages;
  std::optional<WeightVector> page_weights;  // page_weights[i] belongs to pages[i]
};

struct Manifest {
  std::size_t dim = 0;
  ProviderDescriptor provider;
  std::vector<ManifestDocument> documents;
};

/// Parses the manifest JSON. Relative page paths resolve against `base_dir`.
/// Schema violations throw InvalidManifest.
Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

struct IngestedDocument {
  std::size_t manifest_index = 0;
  DocumentEmbedding embedding;
  std::optional<std::string> label;
};

struct IngestFailure {
  std::size_t manifest_index = 0;
  std::string doc_id;
  ErrorCode code = ErrorCode::Internal;
  std::string message;
};

/// documents.size() + failures.size() == manifest.documents.size(); both in manifest order.
struct IngestReport {
  std::vector<IngestedDocument> documents;
  std::vector<IngestFailure> failures;
};

/// Embeds every page (up to `parallelism` calls in flight) and aggregates
/// each document. A failing document is reported and skipped.
IngestReport ingest_manifest(const Manifest& manifest, const EmbeddingProvider& provider,
                             Aggregation mode = Aggregation::Mean, unsigned parallelism = 1);

}  // namespace fed
