#include "fed/ingestion.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fed/random.hpp"

namespace fed {

namespace {

using json = nlohmann::json;

std::vector<std::uint8_t> read_page_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read page '" + path.string() + "'");
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for page '" + path.string() + "'");
  return data;
}

[[noreturn]] void bad_manifest(const std::string& msg) { throw Error(ErrorCode::InvalidManifest, msg); }

}  // namespace

std::uint64_t mock_seed(std::span<const std::uint8_t> content, const std::optional<std::string>& text_hint) {
  std::vector<std::uint8_t> msg(content.begin(), content.end());
  msg.push_back(0x00);
  if (text_hint) msg.insert(msg.end(), text_hint->begin(), text_hint->end());

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(msg.data(), msg.size(), digest, &len, EVP_sha256(), nullptr) != 1 || len != 32) {
    throw Error(ErrorCode::Internal, "SHA-256 failed");
  }
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed |= static_cast<std::uint64_t>(digest[i]) << (8 * i);
  return seed;
}

EmbeddingVector mock_embed(std::span<const std::uint8_t> content, const std::optional<std::string>& text_hint,
                           std::size_t dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "mock embedder needs dim >= 2");
  SplitMix64 rng(mock_seed(content, text_hint));
  std::vector<double> raw(dim);
  double ss = 0.0;
  for (auto& v : raw) {
    v = rng.next_unit() * 2.0 - 1.0;
    ss += v * v;
  }
  const double norm = std::sqrt(ss);
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(raw[i] / norm);
  return EmbeddingVector(std::move(out));
}

MockProvider::MockProvider(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw Error(ErrorCode::InvalidArgument, "mock provider needs dim >= 2");
}

std::vector<float> MockProvider::embed(std::span<const std::uint8_t> content,
                                       const std::optional<std::string>& text_hint) const {
  const auto v = mock_embed(content, text_hint, dim_);
  return {v.values().begin(), v.values().end()};
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string build_embed_request(std::span<const std::uint8_t> content, const std::optional<std::string>& text_hint,
                                std::size_t dim) {
  json req;
  req["content_b64"] = base64_encode(content);
  req["text_hint"] = text_hint ? json(*text_hint) : json(nullptr);
  req["dim"] = dim;
  return req.dump();
}

std::vector<float> parse_embed_response(std::string_view body, std::size_t dim) {
  json resp;
  try {
    resp = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderBadResponse, std::string("unparsable response: ") + e.what());
  }
  if (!resp.is_object() || !resp.contains("vector") || !resp["vector"].is_array()) {
    throw Error(ErrorCode::ProviderBadResponse, "response lacks a 'vector' array");
  }
  const auto& arr = resp["vector"];
  if (arr.size() != dim) {
    throw Error(ErrorCode::ProviderBadResponse,
                "response vector has " + std::to_string(arr.size()) + " components, expected " + std::to_string(dim));
  }
  std::vector<float> out;
  out.reserve(dim);
  for (const auto& x : arr) {
    if (!x.is_number()) throw Error(ErrorCode::ProviderBadResponse, "non-numeric vector component");
    const double d = x.get<double>();
    if (!std::isfinite(d) || !std::isfinite(static_cast<float>(d))) {
      throw Error(ErrorCode::ProviderBadResponse, "non-finite vector component");
    }
    out.push_back(static_cast<float>(d));
  }
  return out;
}

HttpProvider::HttpProvider(std::string url, std::size_t dim, int retries, int timeout_seconds)
    : url_(std::move(url)), dim_(dim), retries_(std::max(0, retries)), timeout_seconds_(timeout_seconds) {
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidArgument, "provider url needs a scheme: " + url_);
  const auto path_start = url_.find('/', scheme_end + 3);
  host_ = url_.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url_.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/embed";
}

std::vector<float> HttpProvider::embed(std::span<const std::uint8_t> content,
                                       const std::optional<std::string>& text_hint) const {
  const std::string body = build_embed_request(content, text_hint, dim_);
  httplib::Client cli(host_);
  cli.set_connection_timeout(timeout_seconds_);
  cli.set_read_timeout(timeout_seconds_);

  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    auto res = cli.Post(path_, body, "application/json");
    if (!res) {
      last_error = "request to " + url_ + " failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return parse_embed_response(res->body, dim_);
    last_error = "provider returned HTTP " + std::to_string(res->status);
    if (!res->body.empty()) last_error += ": " + res->body.substr(0, 200);
    // a client error will not change on retry
    if (res->status < 500) break;
  }
  throw Error(ErrorCode::ProviderUnavailable, last_error);
}

PageEmbedding embed_page(const EmbeddingProvider& provider, const PagePayload& payload) {
  if (payload.content.empty()) {
    throw Error(ErrorCode::ContentRejected, "empty page " + std::to_string(payload.page_index) + " of '" +
                                                payload.doc_id + "'");
  }
  auto values = provider.embed(payload.content, payload.text_hint);
  if (values.size() != provider.dim()) {
    throw Error(ErrorCode::ProviderBadResponse, provider.name() + " returned " + std::to_string(values.size()) +
                                                    " components, expected " + std::to_string(provider.dim()));
  }
  if (!std::all_of(values.begin(), values.end(), [](float x) { return std::isfinite(x); })) {
    throw Error(ErrorCode::ProviderBadResponse, provider.name() + " returned non-finite values");
  }
  return {EmbeddingVector(std::move(values)), payload.page_index, payload.doc_id};
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderDescriptor& desc, std::size_t dim) {
  if (desc.kind == "mock") return std::make_unique<MockProvider>(dim);
  if (desc.kind == "http") {
    if (desc.url.empty()) throw Error(ErrorCode::InvalidArgument, "http provider needs a url");
    return std::make_unique<HttpProvider>(desc.url, dim, desc.retries);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown provider kind '" + desc.kind + "'");
}

Manifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    bad_manifest(std::string("not valid JSON: ") + e.what());
  }
  if (!root.is_object()) bad_manifest("top level must be an object");

  Manifest m;
  try {
    if (!root.contains("dim") || !root["dim"].is_number_integer() || root["dim"].get<long long>() <= 0) {
      bad_manifest("'dim' must be a positive integer");
    }
    m.dim = root["dim"].get<std::size_t>();

    if (root.contains("provider")) {
      const auto& p = root["provider"];
      if (!p.is_object() || !p.contains("kind") || !p["kind"].is_string()) bad_manifest("'provider.kind' missing");
      m.provider.kind = p["kind"].get<std::string>();
      if (m.provider.kind != "mock" && m.provider.kind != "http") {
        bad_manifest("provider kind must be 'mock' or 'http'");
      }
      if (p.contains("url")) m.provider.url = p["url"].get<std::string>();
      if (m.provider.kind == "http" && m.provider.url.empty()) bad_manifest("http provider needs 'url'");
    }

    if (!root.contains("documents") || !root["documents"].is_array()) bad_manifest("'documents' must be an array");
    std::set<std::string> doc_ids;
    for (const auto& d : root["documents"]) {
      ManifestDocument doc;
      if (!d.is_object() || !d.contains("doc_id") || !d["doc_id"].is_string()) bad_manifest("document lacks 'doc_id'");
      doc.doc_id = d["doc_id"].get<std::string>();
      if (!doc_ids.insert(doc.doc_id).second) bad_manifest("duplicate doc_id '" + doc.doc_id + "'");
      if (d.contains("label") && !d["label"].is_null()) doc.label = d["label"].get<std::string>();

      if (!d.contains("pages") || !d["pages"].is_array() || d["pages"].empty()) {
        bad_manifest("document '" + doc.doc_id + "' needs a nonempty 'pages' array");
      }
      std::set<std::uint32_t> indices;
      for (std::size_t i = 0; i < d["pages"].size(); ++i) {
        const auto& p = d["pages"][i];
        if (!p.is_object()) bad_manifest("page entries must be objects");
        PageLocator loc;
        loc.page_index = p.contains("page_index") ? p["page_index"].get<std::uint32_t>() : static_cast<std::uint32_t>(i);
        if (!indices.insert(loc.page_index).second) {
          bad_manifest("document '" + doc.doc_id + "' repeats page_index " + std::to_string(loc.page_index));
        }
        if (p.contains("path")) {
          const std::filesystem::path path = p["path"].get<std::string>();
          loc.path = path.is_absolute() ? path : base_dir / path;
        }
        if (p.contains("vector")) {
          loc.vector = p["vector"].get<std::vector<float>>();
          if (loc.vector->size() != m.dim) {
            bad_manifest("page vector of '" + doc.doc_id + "' has " + std::to_string(loc.vector->size()) +
                         " components, manifest dim is " + std::to_string(m.dim));
          }
        }
        if (loc.path.has_value() == loc.vector.has_value()) {
          bad_manifest("each page of '" + doc.doc_id + "' needs exactly one of 'path' or 'vector'");
        }
        if (p.contains("text_hint") && !p["text_hint"].is_null()) loc.text_hint = p["text_hint"].get<std::string>();
        doc.pages.push_back(std::move(loc));
      }

      if (d.contains("page_weights")) {
        auto w = d["page_weights"].get<std::vector<double>>();
        if (w.size() != doc.pages.size()) bad_manifest("page_weights of '" + doc.doc_id + "' do not match pages");
        try {
          doc.page_weights = WeightVector(std::move(w));
        } catch (const Error& e) {
          bad_manifest("page_weights of '" + doc.doc_id + "': " + e.what());
        }
      }
      m.documents.push_back(std::move(doc));
    }
  } catch (const json::exception& e) {
    bad_manifest(std::string("schema error: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open manifest '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest(text, path.parent_path());
}

IngestReport ingest_manifest(const Manifest& manifest, const EmbeddingProvider& provider, Aggregation mode,
                             unsigned parallelism) {
  if (provider.dim() != manifest.dim) {
    throw Error(ErrorCode::DimensionMismatch, "provider dim " + std::to_string(provider.dim()) +
                                                  " != manifest dim " + std::to_string(manifest.dim));
  }

  struct Task {
    std::size_t doc;
    std::size_t page;
  };
  struct Slot {
    std::optional<PageEmbedding> page;
    std::optional<Error> error;
  };

  std::vector<Task> tasks;
  std::vector<std::vector<Slot>> slots(manifest.documents.size());
  for (std::size_t d = 0; d < manifest.documents.size(); ++d) {
    slots[d].resize(manifest.documents[d].pages.size());
    for (std::size_t p = 0; p < manifest.documents[d].pages.size(); ++p) tasks.push_back({d, p});
  }

  auto run_task = [&](const Task& t) {
    const auto& doc = manifest.documents[t.doc];
    const auto& loc = doc.pages[t.page];
    Slot& slot = slots[t.doc][t.page];
    try {
      if (loc.vector) {
        slot.page = PageEmbedding{EmbeddingVector(*loc.vector), loc.page_index, doc.doc_id};
      } else {
        PagePayload payload{doc.doc_id, loc.page_index, read_page_file(*loc.path), loc.text_hint};
        slot.page = embed_page(provider, payload);
      }
    } catch (const Error& e) {
      slot.error = e;
    } catch (const std::exception& e) {
      slot.error = Error(ErrorCode::Internal, e.what());
    }
  };

  const std::size_t workers = std::min<std::size_t>(std::max(1u, parallelism), tasks.size());
  if (workers <= 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(tasks[i]);
      });
    }
  }

  IngestReport report;
  for (std::size_t d = 0; d < manifest.documents.size(); ++d) {
    const auto& doc = manifest.documents[d];
    try {
      std::vector<PageEmbedding> pages;
      pages.reserve(slots[d].size());
      for (auto& slot : slots[d]) {
        if (slot.error) throw *slot.error;
        pages.push_back(std::move(*slot.page));
      }
      PageAggregation agg;
      if (mode == Aggregation::Weighted) {
        if (!doc.page_weights) throw Error(ErrorCode::MissingWeight, "weighted aggregation needs page_weights");
        agg = PageAggregation::weighted(*doc.page_weights);
      }
      report.documents.push_back({d, build_document_embedding(pages, agg), doc.label});
    } catch (const Error& e) {
      report.failures.push_back({d, doc.doc_id, e.code(), e.what()});
    }
  }
  return report;
}

}  // namespace fed
