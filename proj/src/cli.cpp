// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "reclink/bench.hpp"
#include "reclink/csv.hpp"
#include "reclink/error.hpp"
#include "reclink/evaluation.hpp"
#include "reclink/pipeline.hpp"

namespace reclink {
namespace {

namespace fs = std::filesystem;

constexpr const char* kSparseFile = "sparse.idx";
constexpr const char* kCacheFile = "embeddings.cache";

struct Settings {
  std::string reference;
  std::string queries;
  std::string text_col = "text";
  std::string query_col;
  std::string block_col;
  std::string truth;
  std::string out;
  std::string format;
  std::string backend = "mock";
  std::string gateway_url;
  std::string embed_model = "mock-embed";
  std::string rerank_model = "mock-rerank";
  std::string select_model = "mock-select";
  std::string dense_mode = "exact";
  std::string index_dir;
  std::string cache;
  std::string task = "task";
  std::size_t k = kDefaultTopK;
  std::size_t jobs = 1;
  std::size_t llm_top_m = kDefaultLlmTopM;
  std::uint64_t seed = kDefaultSeed;
  double tau = 0.0;
  bool tau_set = false;
  bool llm_select = false;
  bool quiet = false;
  double fraction = kDefaultTestFraction;
  long timeout_ms = 30000;
  std::vector<std::size_t> sizes;
};

class Progress {
 public:
  Progress(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}
  void operator()(const std::string& line) const {
    if (!quiet_) err_ << "reclink: " << line << "\n";
  }

 private:
  std::ostream& err_;
  bool quiet_;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::kConfig, std::string(flag) + " is required");
}

GatewayConfig gateway_config(const Settings& s) {
  GatewayConfig config;
  config.mode = s.backend == "remote" ? GatewayMode::kRemote : GatewayMode::kMock;
  if (!s.gateway_url.empty()) config.base_url = s.gateway_url;
  config.embed_model = s.embed_model;
  config.rerank_model = s.rerank_model;
  config.select_model = s.select_model;
  config.timeout = std::chrono::milliseconds(s.timeout_ms);
  config.validate();
  return config;
}

PipelineOptions pipeline_options(const Settings& s) {
  PipelineOptions options;
  options.k = s.k;
  options.jobs = s.jobs;
  options.llm_select = s.llm_select;
  options.llm_top_m = s.llm_top_m;
  options.blocking = !s.block_col.empty();
  options.dense_mode = s.dense_mode == "approximate" ? IndexMode::kApproximate : IndexMode::kExact;
  options.approximate.seed = s.seed;
  options.validate();
  return options;
}

LoadOptions load_options(const Settings& s, RecordRole role) {
  LoadOptions options;
  options.role = role;
  options.text_column =
      role == RecordRole::kQuery && !s.query_col.empty() ? s.query_col : s.text_col;
  if (!s.block_col.empty()) options.block_column = s.block_col;
  return options;
}

RecordSet load(const std::string& path, const Settings& s, RecordRole role) {
  LoadOptions options = load_options(s, role);
  options.format = format_from_path(path);
  return load_records(path, options);
}

std::optional<std::string> cache_path(const Settings& s) {
  if (!s.cache.empty()) return s.cache;
  if (!s.index_dir.empty()) return (fs::path(s.index_dir) / kCacheFile).string();
  return std::nullopt;
}

std::optional<EmbeddingCache> open_cache(const Settings& s) {
  const std::optional<std::string> path = cache_path(s);
  if (!path) return std::nullopt;
  return EmbeddingCache::open(*path, s.embed_model);
}

/// Writes `content` to --out, or to `out` when no path is set.
void emit(const Settings& s, std::ostream& out, const std::string& content) {
  if (s.out.empty()) {
    out << content;
    return;
  }
  std::ofstream file(s.out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + s.out);
  file << content;
  if (!file.flush()) throw Error(ErrorKind::kIo, "cannot write " + s.out);
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

int cmd_index(const Settings& s, std::ostream& out, const Progress& progress) {
  require(s.reference, "--reference");
  require(s.index_dir, "--index-dir");
  const RecordSet reference = load(s.reference, s, RecordRole::kReference);
  progress("loaded " + std::to_string(reference.size()) + " reference records");

  std::error_code ec;
  fs::create_directories(s.index_dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + s.index_dir + ": " + ec.message());

  std::optional<EmbeddingCache> cache = open_cache(s);
  const std::unique_ptr<ModelGateway> gateway = make_gateway(gateway_config(s));
  Linker linker(reference, *gateway, ModelIds{s.embed_model, s.rerank_model, s.select_model},
                pipeline_options(s));
  linker.build(cache ? &*cache : nullptr);
  const std::string sparse_path = (fs::path(s.index_dir) / kSparseFile).string();
  linker.sparse_index().save(sparse_path);
  progress("wrote " + sparse_path);

  const EmbedStats& stats = linker.corpus_embed_stats();
  std::ostringstream summary;
  summary << "records      " << reference.size() << "\n";
  summary << "vocabulary   " << linker.sparse_index().terms().size() << "\n";
  summary << "dim          " << linker.vector_index().dim() << "\n";
  summary << "embedded     " << stats.embedded << " new, " << stats.cache_hits << " cached\n";
  summary << "sparse index " << sparse_path << "\n";
  if (cache && cache->path()) summary << "cache        " << *cache->path() << "\n";
  emit(s, out, summary.str());
  return 0;
}

int cmd_link(const Settings& s, std::ostream& out, const Progress& progress) {
  require(s.reference, "--reference");
  require(s.queries, "--queries");
  const RecordSet reference = load(s.reference, s, RecordRole::kReference);
  const RecordSet queries = load(s.queries, s, RecordRole::kQuery);
  progress("loaded " + std::to_string(reference.size()) + " reference records and " +
           std::to_string(queries.size()) + " queries");

  PipelineOptions options = pipeline_options(s);
  if (s.tau_set) {
    options.abstain_below = s.tau;
    options.validate();
  }
  std::optional<EmbeddingCache> cache = open_cache(s);
  std::optional<SparseIndex> prebuilt;
  if (!s.index_dir.empty()) {
    const fs::path sparse_path = fs::path(s.index_dir) / kSparseFile;
    if (fs::exists(sparse_path)) prebuilt = SparseIndex::load(sparse_path.string());
  }

  const std::unique_ptr<ModelGateway> gateway = make_gateway(gateway_config(s));
  Linker linker(reference, *gateway, ModelIds{s.embed_model, s.rerank_model, s.select_model},
                options);
  linker.build(cache ? &*cache : nullptr, std::move(prebuilt));
  progress("indexed reference corpus");
  const std::vector<LinkageResult> results = linker.link(queries, cache ? &*cache : nullptr);
  progress("linked " + std::to_string(results.size()) + " queries");

  std::ostringstream csv_out;
  csv::write_row(csv_out,
                 {"query_id", "query", "match_id", "match", "score", "selector", "n_candidates"});
  for (const LinkageResult& r : results) {
    double score = 0.0;
    if (r.prediction) {
      for (const ScoredCandidate& c : r.scored) {
        if (c.record_id == *r.prediction) score = c.rerank_score;
      }
    } else if (!r.scored.empty()) {
      score = r.scored.front().rerank_score;
    }
    csv::write_row(csv_out, {std::to_string(r.query_id), queries[r.query_id].raw,
                             r.prediction ? std::to_string(*r.prediction) : "",
                             r.prediction ? reference[*r.prediction].raw : "", fixed(score, 6),
                             std::string(to_string(r.selector)), std::to_string(r.union_count)});
  }
  emit(s, out, csv_out.str());
  return 0;
}

int cmd_evaluate(const Settings& s, std::ostream& out, const Progress& progress) {
  require(s.reference, "--reference");
  require(s.queries, "--queries");
  require(s.truth, "--truth");
  if (!s.format.empty() && s.format != "table" && s.format != "json") {
    throw Error(ErrorKind::kConfig, "--format must be table or json");
  }
  TaskConfig task;
  task.reference_path = s.reference;
  task.queries_path = s.queries;
  task.truth_path = s.truth;
  task.reference_load = load_options(s, RecordRole::kReference);
  task.reference_load.format = format_from_path(s.reference);
  task.query_load = load_options(s, RecordRole::kQuery);
  task.query_load.format = format_from_path(s.queries);
  task.gateway = gateway_config(s);
  task.cache_path = cache_path(s);
  task.eval.task = s.task;
  task.eval.test_fraction = s.fraction;
  task.eval.seed = s.seed;
  if (s.tau_set) task.eval.tau = s.tau;
  task.eval.pipeline = pipeline_options(s);
  task.eval.models = ModelIds::from(task.gateway);
  task.eval.backend = s.backend;

  progress("evaluating " + s.task);
  const EvalReport report = run_task(task);
  progress("evaluated " + std::to_string(report.n_test) + " test queries");
  const std::string json = report.to_json();
  if (s.format == "json") {
    out << json;
  } else {
    out << report.to_table();
  }
  if (!s.out.empty()) emit(s, out, json);
  return 0;
}

int cmd_bench(const Settings& s, std::ostream& out, const Progress& progress) {
  require(s.reference, "--reference");
  require(s.queries, "--queries");
  require(s.truth, "--truth");
  if (s.sizes.empty()) throw Error(ErrorKind::kConfig, "--sizes is required");
  if (!s.format.empty() && s.format != "table" && s.format != "csv") {
    throw Error(ErrorKind::kConfig, "--format must be table or csv");
  }
  const RecordSet reference = load(s.reference, s, RecordRole::kReference);
  const RecordSet queries = load(s.queries, s, RecordRole::kQuery);
  const GroundTruth truth = load_ground_truth(s.truth, reference);

  BenchOptions options;
  options.sizes = s.sizes;
  options.seed = s.seed;
  options.test_fraction = s.fraction;
  options.pipeline = pipeline_options(s);
  options.models = ModelIds{s.embed_model, s.rerank_model, s.select_model};
  const std::unique_ptr<ModelGateway> gateway = make_gateway(gateway_config(s));
  progress("benchmarking " + std::to_string(s.sizes.size()) + " corpus sizes");
  const std::vector<BenchRow> rows = run_scaling(reference, queries, truth, *gateway, options);

  std::ostringstream csv_out;
  write_bench_csv(csv_out, rows);
  if (s.format == "csv") {
    out << csv_out.str();
  } else {
    out << format_bench_table(rows, s.jobs);
  }
  if (!s.out.empty()) emit(s, out, csv_out.str());
  return 0;
}

void add_shared_options(CLI::App& app, Settings& s, CLI::Option*& tau_opt) {
  app.add_option("--reference", s.reference, "Reference corpus (CSV or JSONL)");
  app.add_option("--queries", s.queries, "Query file (CSV or JSONL)");
  app.add_option("--text-col", s.text_col, "Text column")->capture_default_str();
  app.add_option("--query-col", s.query_col, "Query text column (default: --text-col)");
  app.add_option("--block-col", s.block_col, "Blocking key column; enables blocking");
  app.add_option("--k", s.k, "Candidates per retriever")->capture_default_str();
  app.add_option("--seed", s.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--backend", s.backend, "Model backend")
      ->check(CLI::IsMember({"mock", "remote"}))
      ->capture_default_str();
  app.add_option("--gateway-url", s.gateway_url, "Model server base URL");
  app.add_option("--embed-model", s.embed_model, "Embedding model id")->capture_default_str();
  app.add_option("--rerank-model", s.rerank_model, "Reranker model id")->capture_default_str();
  app.add_option("--select-model", s.select_model, "Selection model id")->capture_default_str();
  app.add_option("--timeout-ms", s.timeout_ms, "Gateway request timeout")->capture_default_str();
  tau_opt = app.add_option("--tau", s.tau,
                           "link: abstain below this top-1 score; evaluate: pair-level threshold");
  app.add_flag("--llm-select", s.llm_select, "Add the LLM selection stage");
  app.add_option("--llm-top-m", s.llm_top_m, "Candidates shown to the LLM")->capture_default_str();
  app.add_option("--dense-mode", s.dense_mode, "Vector search mode")
      ->check(CLI::IsMember({"exact", "approximate"}))
      ->capture_default_str();
  app.add_option("--jobs", s.jobs, "Query-level threads")->capture_default_str();
  app.add_option("--index-dir", s.index_dir, "Directory for the sparse index and embedding cache");
  app.add_option("--cache", s.cache, "Embedding cache file");
  app.add_option("--out", s.out, "Output file");
  app.add_option("--format", s.format, "Output format");
  app.add_flag("--quiet", s.quiet, "No progress output");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Zero-shot record linkage with retrieve-and-rerank", "reclink"};
  app.set_config("--config", "", "Key/value config file; command-line flags take precedence");
  app.require_subcommand(1);
  CLI::Option* tau_opt = nullptr;
  add_shared_options(app, s, tau_opt);

  CLI::App* index = app.add_subcommand("index", "Build the sparse index and embedding cache");
  CLI::App* link = app.add_subcommand("link", "Link every query to one reference record");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Split queries, link and score a task");
  evaluate->add_option("--truth", s.truth, "Ground-truth CSV");
  evaluate->add_option("--fraction", s.fraction, "Test fraction")->capture_default_str();
  evaluate->add_option("--task", s.task, "Task name for the report")->capture_default_str();
  CLI::App* bench = app.add_subcommand("bench", "Time each stage across corpus sizes");
  bench->add_option("--truth", s.truth, "Ground-truth CSV");
  bench->add_option("--fraction", s.fraction, "Test fraction")->capture_default_str();
  bench->add_option("--sizes", s.sizes, "Comma-separated corpus sizes")->delimiter(',');
  for (CLI::App* sub : {index, link, evaluate, bench}) sub->fallthrough();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("reclink");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const std::string& a : storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "reclink: " << e.what() << "\n";
    return exit_code(ErrorKind::kConfig);
  }
  s.tau_set = tau_opt->count() > 0;

  const Progress progress(err, s.quiet);
  try {
    if (index->parsed()) return cmd_index(s, out, progress);
    if (link->parsed()) return cmd_link(s, out, progress);
    if (evaluate->parsed()) return cmd_evaluate(s, out, progress);
    return cmd_bench(s, out, progress);
  } catch (const Error& e) {
    err << "reclink: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "reclink: " << e.what() << "\n";
    return exit_code(ErrorKind::kIo);
  }
}

}  // namespace reclink
