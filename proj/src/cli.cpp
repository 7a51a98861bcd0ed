#include "fed/cli.hpp"

#include <chrono>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fed/aggregation.hpp"
#include "fed/classifier.hpp"
#include "fed/eval.hpp"
#include "fed/ingestion.hpp"
#include "fed/random.hpp"
#include "fed/store.hpp"
#include "fed/vector_index.hpp"

namespace fed::cli {

namespace {

using json = nlohmann::json;

enum class Format { Json, Table };

struct CliConfig {
  std::string command;
  std::string store_path;
  std::string manifest_path;
  std::string input_path;
  std::string text_hint;
  std::string doc_id;
  std::string provider = "mock";
  std::string provider_url;
  int provider_retries = 1;
  std::string measure = "cosine";
  std::string aggregation = "mean";
  std::string averaging = "macro";
  double train_frac = 0.7;
  double val_frac = 0.1;
  double test_frac = 0.2;
  std::uint64_t seed = 42;
  std::size_t nlist = 16;
  std::vector<std::size_t> nprobes;
  std::size_t k = 10;
  std::size_t queries = 100;
  bool no_timing = false;
  std::string index_out;
  unsigned parallelism = 1;
  std::string format = "json";
};

std::string fmt4(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

Format parse_format(const std::string& f) {
  if (f == "json") return Format::Json;
  if (f == "table") return Format::Table;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + f + "'");
}

int exit_for(ErrorCode code) { return exit_code(category(code)); }

// ---- build ---------------------------------------------------------------

int cmd_build(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto fmt = parse_format(cfg.format);
  const auto mode = parse_aggregation(cfg.aggregation);
  const Manifest manifest = load_manifest(cfg.manifest_path);
  for (const auto& d : manifest.documents) {
    if (!d.label) throw Error(ErrorCode::InvalidManifest, "document '" + d.doc_id + "' has no label");
  }
  ProviderDescriptor desc = manifest.provider;
  desc.retries = cfg.provider_retries;
  const auto provider = make_provider(desc, manifest.dim);
  const IngestReport report = ingest_manifest(manifest, *provider, mode, cfg.parallelism);

  std::vector<LabeledSample> samples;
  std::vector<LabeledDocument> labeled;
  for (const auto& d : report.documents) {
    samples.push_back({d.manifest_index, *d.label, d.embedding});
    labeled.push_back({d.embedding, *d.label});
  }
  std::vector<ClassCentroid> centroids;
  if (!labeled.empty()) {
    centroids = build_class_centroids(labeled);
    write_store(cfg.store_path, static_cast<std::uint32_t>(manifest.dim), std::span<const LabeledSample>(samples),
                centroids);
  }

  if (fmt == Format::Json) {
    for (const auto& c : centroids) out << json{{"label", c.label}, {"member_count", c.member_count}}.dump() << '\n';
    json failures = json::array();
    for (const auto& f : report.failures) {
      failures.push_back({{"doc_id", f.doc_id}, {"error", to_string(f.code)}, {"message", f.message}});
    }
    out << json{{"store", labeled.empty() ? json(nullptr) : json(cfg.store_path)},
                {"samples", samples.size()},
                {"classes", centroids.size()},
                {"failures", failures}}
               .dump()
        << '\n';
  } else {
    out << std::left << std::setw(24) << "Class" << "Members\n";
    for (const auto& c : centroids) out << std::left << std::setw(24) << c.label << c.member_count << '\n';
    out << "samples: " << samples.size() << ", classes: " << centroids.size()
        << ", failures: " << report.failures.size() << '\n';
  }
  for (const auto& f : report.failures) err << "error: document '" << f.doc_id << "': " << f.message << '\n';

  if (!report.failures.empty()) return exit_for(report.failures.front().code);
  return 0;
}

// ---- classify ------------------------------------------------------------

int cmd_classify(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto fmt = parse_format(cfg.format);
  const auto measure = parse_measure(cfg.measure);
  const auto mode = parse_aggregation(cfg.aggregation);
  if (cfg.manifest_path.empty() == cfg.input_path.empty()) {
    throw Error(ErrorCode::InvalidArgument, "classify needs exactly one of --manifest or --input");
  }
  const StoreContents store = read_store(cfg.store_path);
  if (store.centroids.empty()) throw Error(ErrorCode::NoClasses, "store '" + cfg.store_path + "' has no centroids");

  Manifest manifest;
  if (!cfg.manifest_path.empty()) {
    manifest = load_manifest(cfg.manifest_path);
  } else {
    manifest.dim = store.dim;
    ManifestDocument doc;
    doc.doc_id = cfg.doc_id.empty() ? cfg.input_path : cfg.doc_id;
    PageLocator loc;
    loc.path = cfg.input_path;
    if (!cfg.text_hint.empty()) loc.text_hint = cfg.text_hint;
    doc.pages.push_back(std::move(loc));
    manifest.documents.push_back(std::move(doc));
    manifest.provider.kind = cfg.provider;
  }
  if (!cfg.provider_url.empty()) {
    manifest.provider.kind = "http";
    manifest.provider.url = cfg.provider_url;
  }
  if (manifest.dim != store.dim) {
    throw Error(ErrorCode::DimensionMismatch, "inputs have dim " + std::to_string(manifest.dim) + ", store has " +
                                                  std::to_string(store.dim));
  }
  ProviderDescriptor desc = manifest.provider;
  desc.retries = cfg.provider_retries;
  const auto provider = make_provider(desc, manifest.dim);
  const IngestReport report = ingest_manifest(manifest, *provider, mode, cfg.parallelism);

  std::vector<BatchQuery> queries;
  for (const auto& d : report.documents) queries.push_back({d.embedding.doc_id, d.embedding.vector});
  const auto results = classify_batch(queries, store.centroids, measure, cfg.parallelism);

  // merge back into manifest order
  std::map<std::size_t, std::string> lines;
  std::map<std::size_t, ErrorCode> errors;
  auto error_line = [&](std::size_t idx, const std::string& doc_id, ErrorCode code, const std::string& message) {
    lines[idx] = json{{"doc_id", doc_id}, {"error", to_string(code)}, {"message", message}}.dump();
    errors[idx] = code;
    err << "error: document '" << doc_id << "': " << message << '\n';
  };
  for (const auto& f : report.failures) error_line(f.manifest_index, f.doc_id, f.code, f.message);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto idx = report.documents[i].manifest_index;
    const auto& r = results[i];
    if (r.error) {
      error_line(idx, r.doc_id, r.error->code, r.error->message);
      continue;
    }
    if (fmt == Format::Json) {
      json ranking = json::array();
      for (const auto& rc : r.result->ranking) ranking.push_back({{"label", rc.label}, {"score", rc.score}});
      lines[idx] = json{{"doc_id", r.doc_id},
                        {"predicted", r.result->predicted_label},
                        {"measure", to_string(measure)},
                        {"ranking", ranking}}
                       .dump();
    } else {
      std::ostringstream s;
      s << "document: " << r.doc_id << "  predicted: " << r.result->predicted_label << "  (" << to_string(measure)
        << ")\n";
      s << "  " << std::left << std::setw(6) << "Rank" << std::setw(24) << "Class" << "Score";
      for (std::size_t k = 0; k < r.result->ranking.size(); ++k) {
        s << "\n  " << std::left << std::setw(6) << (k + 1) << std::setw(24) << r.result->ranking[k].label
          << fmt4(r.result->ranking[k].score);
      }
      lines[idx] = s.str();
    }
  }
  for (const auto& [idx, line] : lines) out << line << '\n';

  // exit status follows the first failing document in manifest order
  if (!errors.empty()) return exit_for(errors.begin()->second);
  return 0;
}

// ---- evaluate ------------------------------------------------------------

json report_json(const EvaluationResult& res, SimilarityMeasure measure) {
  const auto& rep = res.report;
  json per_class = json::object();
  for (const auto& [label, m] : rep.per_class) {
    per_class[label] = {{"precision", m.precision},
                        {"recall", m.recall},
                        {"f1", m.f1},
                        {"support", m.support},
                        {"precision_undefined", m.precision_undefined},
                        {"recall_undefined", m.recall_undefined},
                        {"f1_undefined", m.f1_undefined}};
  }
  json counts = json::array();
  for (std::size_t r = 0; r < res.confusion.size(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < res.confusion.size(); ++c) row.push_back(res.confusion.at(r, c));
    counts.push_back(row);
  }
  return {{"method", "nearest-centroid"},
          {"measure", to_string(measure)},
          {"averaging", to_string(rep.averaging)},
          {"accuracy", rep.accuracy},
          {"precision", rep.precision},
          {"recall", rep.recall},
          {"f1", rep.f1},
          {"train_size", res.split.train.size()},
          {"val_size", res.split.val.size()},
          {"test_size", res.split.test.size()},
          {"validation_used", false},
          {"per_class", per_class},
          {"confusion", {{"labels", res.confusion.labels()}, {"counts", counts}}}};
}

void report_table(const EvaluationResult& res, SimilarityMeasure measure, std::ostream& out) {
  const auto& rep = res.report;
  out << "averaging: " << to_string(rep.averaging) << "  measure: " << to_string(measure)
      << "  train/val/test: " << res.split.train.size() << "/" << res.split.val.size() << "/"
      << res.split.test.size() << " (validation unused)\n";
  const std::string method = std::string("nearest-centroid (") + std::string(to_string(measure)) + ")";
  out << std::left << std::setw(28) << "Method" << std::setw(10) << "Accuracy" << std::setw(11) << "Precision"
      << std::setw(8) << "Recall" << "F1-Score\n";
  out << std::left << std::setw(28) << method << std::setw(10) << fmt4(rep.accuracy) << std::setw(11)
      << fmt4(rep.precision) << std::setw(8) << fmt4(rep.recall) << fmt4(rep.f1) << '\n';
  out << '\n' << std::left << std::setw(24) << "Class" << std::setw(11) << "Precision" << std::setw(8) << "Recall"
      << std::setw(10) << "F1-Score" << "Support\n";
  for (const auto& [label, m] : rep.per_class) {
    out << std::left << std::setw(24) << label << std::setw(11)
        << (fmt4(m.precision) + (m.precision_undefined ? "*" : "")) << std::setw(8)
        << (fmt4(m.recall) + (m.recall_undefined ? "*" : "")) << std::setw(10)
        << (fmt4(m.f1) + (m.f1_undefined ? "*" : "")) << m.support << '\n';
  }
}

int cmd_evaluate(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto fmt = parse_format(cfg.format);
  EvaluationOptions opts;
  opts.split = {cfg.train_frac, cfg.val_frac, cfg.test_frac, cfg.seed};
  opts.split.validate();
  opts.measure = parse_measure(cfg.measure);
  opts.averaging = parse_averaging(cfg.averaging);
  opts.parallelism = cfg.parallelism;
  const auto store = read_store(cfg.store_path);
  const auto res = run_evaluation(store, opts);
  if (fmt == Format::Json) {
    out << report_json(res, opts.measure).dump() << '\n';
  } else {
    report_table(res, opts.measure, out);
  }
  return 0;
}

// ---- bench ---------------------------------------------------------------

int cmd_bench(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto fmt = parse_format(cfg.format);
  const auto measure = parse_measure(cfg.measure);
  if (cfg.nprobes.empty()) throw Error(ErrorCode::InvalidArgument, "--nprobe list is empty");
  for (auto p : cfg.nprobes) {
    if (p == 0 || p > cfg.nlist) {
      throw Error(ErrorCode::BadNprobe, "nprobe " + std::to_string(p) + " outside [1, " + std::to_string(cfg.nlist) + "]");
    }
  }
  if (cfg.k == 0) throw Error(ErrorCode::BadK, "k must be positive");

  const auto store = read_store(cfg.store_path);
  if (store.samples.empty()) throw Error(ErrorCode::EmptyInput, "store has no samples");

  std::map<std::string, std::uint32_t> label_id;
  for (std::uint32_t i = 0; i < store.label_table.size(); ++i) label_id[store.label_table[i]] = i;

  std::vector<EmbeddingVector> vectors;
  vectors.reserve(store.samples.size());
  for (const auto& s : store.samples) vectors.push_back(s.vector);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  FlatIndex flat(store.dim);
  for (const auto& s : store.samples) flat.add(s.id, s.vector, label_id.at(s.label));
  auto ivf = IvfFlatIndex::train(vectors, cfg.nlist, cfg.seed);
  for (const auto& s : store.samples) ivf.add(s.id, s.vector, label_id.at(s.label));
  const double build_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  if (!cfg.index_out.empty()) save_ivf_index(cfg.index_out, ivf, store.label_table);

  // deterministic query subset
  std::vector<std::size_t> order(store.samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(cfg.seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.next_below(i + 1)]);
  order.resize(std::min(cfg.queries, order.size()));

  std::vector<std::vector<SearchHit>> truth;
  truth.reserve(order.size());
  const auto tf = clock::now();
  for (auto i : order) truth.push_back(flat.search(vectors[i], cfg.k, measure));
  const double flat_us =
      std::chrono::duration<double, std::micro>(clock::now() - tf).count() / static_cast<double>(order.size());

  struct Row {
    std::size_t nprobe;
    double recall;
    double us;
  };
  std::vector<Row> rows;
  for (auto nprobe : cfg.nprobes) {
    double recall = 0.0;
    const auto ts = clock::now();
    std::vector<std::vector<SearchHit>> approx;
    approx.reserve(order.size());
    for (auto i : order) approx.push_back(ivf.search(vectors[i], cfg.k, nprobe, measure));
    const double us =
        std::chrono::duration<double, std::micro>(clock::now() - ts).count() / static_cast<double>(order.size());
    for (std::size_t q = 0; q < order.size(); ++q) recall += recall_at_k(truth[q], approx[q]);
    rows.push_back({nprobe, recall / static_cast<double>(order.size()), us});
  }

  if (fmt == Format::Json) {
    json head{{"index", "flat"}, {"entries", flat.size()}, {"queries", order.size()}, {"k", cfg.k},
              {"measure", to_string(measure)}, {"recall", 1.0}};
    if (!cfg.no_timing) {
      head["us_per_query"] = flat_us;
      head["ivf_build_ms"] = build_ms;
    }
    out << head.dump() << '\n';
    for (const auto& r : rows) {
      json line{{"index", "ivf_flat"}, {"nlist", cfg.nlist}, {"nprobe", r.nprobe}, {"k", cfg.k}, {"recall", r.recall}};
      if (!cfg.no_timing) line["us_per_query"] = r.us;
      out << line.dump() << '\n';
    }
  } else {
    out << "entries: " << flat.size() << "  queries: " << order.size() << "  k: " << cfg.k
        << "  nlist: " << cfg.nlist << "  measure: " << to_string(measure) << '\n';
    out << std::left << std::setw(10) << "Index" << std::setw(8) << "nprobe" << std::setw(10) << "Recall@k"
        << (cfg.no_timing ? "" : "us/query") << '\n';
    out << std::left << std::setw(10) << "flat" << std::setw(8) << "-" << std::setw(10) << fmt4(1.0);
    if (!cfg.no_timing) out << fmt4(flat_us);
    out << '\n';
    for (const auto& r : rows) {
      out << std::left << std::setw(10) << "ivf" << std::setw(8) << r.nprobe << std::setw(10) << fmt4(r.recall);
      if (!cfg.no_timing) out << fmt4(r.us);
      out << '\n';
    }
  }
  return 0;
}

// ---- inspect -------------------------------------------------------------

int cmd_inspect(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto fmt = parse_format(cfg.format);
  const auto bytes = feds::read_bytes(cfg.store_path);
  const feds::File f = feds::decode(bytes);
  // label references are checked here too
  const bool is_index = !f.assignments.empty();
  std::map<std::string, std::uint64_t> per_label;
  for (const auto& l : f.label_table) per_label[l] = 0;
  for (const auto& s : f.samples) {
    if (s.label_id >= f.label_table.size()) throw Error(ErrorCode::BadLabelRef, "sample " + std::to_string(s.id));
    ++per_label[f.label_table[s.label_id]];
  }
  std::uint32_t crc = 0;
  for (int i = 0; i < 4; ++i) crc |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);

  json sections = json::array();
  if (!f.samples.empty()) sections.push_back({{"type", 1}, {"name", "samples"}, {"count", f.samples.size()}});
  if (!f.centroids.empty()) {
    sections.push_back({{"type", 2}, {"name", is_index ? "coarse_centroids" : "centroids"}, {"count", f.centroids.size()}});
  }
  if (is_index) sections.push_back({{"type", 3}, {"name", "ivf_assignments"}, {"count", f.assignments.size()}});
  json centroids = json::array();
  for (const auto& c : f.centroids) {
    if (is_index) {
      centroids.push_back({{"partition", c.label_id}, {"member_count", c.member_count}});
    } else {
      if (c.label_id >= f.label_table.size()) throw Error(ErrorCode::BadLabelRef, "centroid");
      centroids.push_back({{"label", f.label_table[c.label_id]}, {"member_count", c.member_count}});
    }
  }
  std::ostringstream crc_hex;
  crc_hex << "0x" << std::hex << std::setw(8) << std::setfill('0') << crc;

  if (fmt == Format::Json) {
    out << json{{"magic", "FED1"},
                {"version", 1},
                {"dim", f.dim},
                {"file_bytes", bytes.size()},
                {"crc32", crc_hex.str()},
                {"labels", f.label_table},
                {"sections", sections},
                {"samples_per_label", per_label},
                {"centroids", centroids}}
               .dump()
        << '\n';
  } else {
    out << "magic: FED1  version: 1  dim: " << f.dim << "  bytes: " << bytes.size() << "  crc32: " << crc_hex.str()
        << '\n';
    for (const auto& s : sections) {
      out << "section " << s["type"].get<int>() << " (" << s["name"].get<std::string>() << "): "
          << s["count"].get<std::uint64_t>() << " records\n";
    }
    out << std::left << std::setw(6) << "Id" << std::setw(24) << "Label" << "Samples\n";
    for (std::size_t i = 0; i < f.label_table.size(); ++i) {
      out << std::left << std::setw(6) << i << std::setw(24) << f.label_table[i] << per_label[f.label_table[i]] << '\n';
    }
  }
  return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nearest-centroid document classification over multi-modal embeddings", "fed"};
  app.require_subcommand(1);
  CliConfig cfg;

  // Values are validated after parsing rather than with CLI11 checks, which
  // would silently skip an invalid environment variable.
  app.add_option("--format", cfg.format, "Output format: json | table")->envname("FED_FORMAT");
  app.add_option("--parallelism", cfg.parallelism, "Worker threads (1-1024)")->envname("FED_PARALLELISM");

  auto add_store = [&](CLI::App* sub) {
    sub->add_option("--store", cfg.store_path, "FEDS store file")->required()->envname("FED_STORE");
  };
  auto add_measure = [&](CLI::App* sub) {
    sub->add_option("--measure", cfg.measure, "cosine | l2")->envname("FED_MEASURE");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", cfg.seed, "PRNG seed")->envname("FED_SEED"); };
  auto add_aggregation = [&](CLI::App* sub) {
    sub->add_option("--aggregation", cfg.aggregation, "Page aggregation: mean | weighted")->envname("FED_AGGREGATION");
  };
  auto add_retries = [&](CLI::App* sub) {
    sub->add_option("--retries", cfg.provider_retries, "Extra attempts for an unavailable provider")
        ->envname("FED_RETRIES");
  };

  auto* build = app.add_subcommand("build", "Embed a labeled manifest and write a store");
  build->add_option("--manifest", cfg.manifest_path, "Manifest JSON")->required()->envname("FED_MANIFEST");
  add_store(build);
  add_aggregation(build);
  add_retries(build);

  auto* classify = app.add_subcommand("classify", "Classify documents against a store's centroids");
  add_store(classify);
  classify->add_option("--manifest", cfg.manifest_path, "Manifest JSON of documents to classify");
  classify->add_option("--input", cfg.input_path, "Single rendered page file");
  classify->add_option("--text-hint", cfg.text_hint, "Text prompt for --input");
  classify->add_option("--doc-id", cfg.doc_id, "Document id reported for --input");
  classify->add_option("--provider", cfg.provider, "Provider for --input: mock | http");
  classify->add_option("--provider-url", cfg.provider_url, "Embedding service URL (implies http)")
      ->envname("FED_PROVIDER_URL");
  add_measure(classify);
  add_aggregation(classify);
  add_retries(classify);

  auto* evaluate = app.add_subcommand("evaluate", "Stratified split, fit on train, score the test split");
  add_store(evaluate);
  evaluate->add_option("--train", cfg.train_frac, "Train fraction");
  evaluate->add_option("--val", cfg.val_frac, "Validation fraction");
  evaluate->add_option("--test", cfg.test_frac, "Test fraction");
  add_seed(evaluate);
  add_measure(evaluate);
  evaluate->add_option("--averaging", cfg.averaging, "macro | micro")->envname("FED_AVERAGING");

  auto* bench = app.add_subcommand("bench", "Recall and latency of IVF-flat against the flat scan");
  add_store(bench);
  bench->add_option("--nlist", cfg.nlist, "IVF partitions")->envname("FED_NLIST");
  bench->add_option("--nprobe", cfg.nprobes, "Comma separated nprobe values")->delimiter(',')->required();
  bench->add_option("--k", cfg.k, "Neighbours per query")->envname("FED_K");
  bench->add_option("--queries", cfg.queries, "Number of stored samples used as queries");
  bench->add_option("--index-out", cfg.index_out, "Also save the IVF index to this FEDS file");
  bench->add_flag("--no-timing", cfg.no_timing, "Omit wall-clock columns");
  add_seed(bench);
  add_measure(bench);

  auto* inspect = app.add_subcommand("inspect", "Dump a FEDS header, label table and counts");
  add_store(inspect);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(ErrorCategory::Validation);
  }

  try {
    parse_format(cfg.format);
    parse_measure(cfg.measure);
    parse_aggregation(cfg.aggregation);
    parse_averaging(cfg.averaging);
    if (cfg.provider != "mock" && cfg.provider != "http") {
      throw Error(ErrorCode::InvalidArgument, "unknown provider '" + cfg.provider + "'");
    }
    if (cfg.parallelism < 1 || cfg.parallelism > 1024) {
      throw Error(ErrorCode::InvalidArgument, "parallelism must be in [1, 1024]");
    }
    if (cfg.provider_retries < 0) throw Error(ErrorCode::InvalidArgument, "retries must be non-negative");
    if (*build) return cmd_build(cfg, out, err);
    if (*classify) return cmd_classify(cfg, out, err);
    if (*evaluate) return cmd_evaluate(cfg, out, err);
    if (*bench) return cmd_bench(cfg, out, err);
    if (*inspect) return cmd_inspect(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_code(ErrorCategory::Internal);
  }
  return exit_code(ErrorCategory::Internal);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::span<const std::string>(args), out, err);
}

}  // namespace fed::cli
