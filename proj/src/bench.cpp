// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "reclink/error.hpp"
#include "reclink/random.hpp"

namespace reclink {
namespace {

using Clock = std::chrono::steady_clock;

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

BenchRow run_once(const RecordSet& reference, const RecordSet& tests, const GroundTruth& truth,
                  std::span<const RecordId> required, std::size_t size, ModelGateway& gateway,
                  const BenchOptions& options) {
  const std::vector<RecordId> keep = subsample_ids(reference.size(), required, size, options.seed);
  const RecordSet corpus = reference.subset(keep);
  std::map<RecordId, RecordId> remap;
  for (std::size_t i = 0; i < keep.size(); ++i) remap.emplace(keep[i], static_cast<RecordId>(i));
  const GroundTruth local_truth = truth.remapped(remap);

  Linker linker(corpus, gateway, options.models, options.pipeline);
  const auto start = Clock::now();
  linker.build();
  const std::vector<LinkageResult> results = linker.link(tests);
  const double total = std::chrono::duration<double>(Clock::now() - start).count();

  BenchRow row;
  row.corpus_size = corpus.size();
  row.embed_s = linker.timings().embed_s;
  row.index_s = linker.timings().index_s;
  row.retrieve_s = linker.timings().retrieve_s;
  row.rerank_s = linker.timings().rerank_s;
  row.total_s = total;
  row.accuracy = top1_accuracy(results, tests, local_truth);
  row.n_queries = tests.size();
  row.queries_per_s = total > 0.0 ? static_cast<double>(tests.size()) / total : 0.0;
  return row;
}

}  // namespace

std::vector<RecordId> subsample_ids(std::size_t corpus_size, std::span<const RecordId> required,
                                    std::size_t size, std::uint64_t seed) {
  const std::set<RecordId> must(required.begin(), required.end());
  if (size > corpus_size) {
    throw Error(ErrorKind::kConfig, "sample size " + std::to_string(size) +
                                        " exceeds the corpus size " + std::to_string(corpus_size));
  }
  if (size < must.size()) {
    throw Error(ErrorKind::kConfig, "sample size " + std::to_string(size) + " cannot hold the " +
                                        std::to_string(must.size()) + " gold reference records");
  }
  std::vector<RecordId> rest;
  rest.reserve(corpus_size - must.size());
  for (std::size_t id = 0; id < corpus_size; ++id) {
    if (!must.contains(static_cast<RecordId>(id))) rest.push_back(static_cast<RecordId>(id));
  }
  const std::size_t fill = size - must.size();
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < fill; ++i) {
    const std::size_t j = i + rng.below(rest.size() - i);
    std::swap(rest[i], rest[j]);
  }
  std::vector<RecordId> out(must.begin(), must.end());
  out.insert(out.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(fill));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BenchRow> run_scaling(const RecordSet& reference, const RecordSet& queries,
                                  const GroundTruth& truth, ModelGateway& gateway,
                                  const BenchOptions& options) {
  if (options.sizes.empty()) throw Error(ErrorKind::kConfig, "no corpus sizes given");
  options.pipeline.validate();

  std::vector<std::string> unique;
  for (const Record& q : queries) {
    if (q.retrievable()) unique.push_back(q.norm);
  }
  const QuerySplit split = split_queries(std::move(unique), options.test_fraction, options.seed);
  if (split.test.empty()) throw Error(ErrorKind::kSplit, "test split is empty");
  const RecordSet tests = test_queries(queries, split.test);

  std::set<RecordId> gold;
  for (const Record& q : tests) {
    const std::set<RecordId>* ids = truth.find(q.norm);
    if (!ids) throw Error(ErrorKind::kEvaluation, "query '" + q.norm + "' has no ground truth");
    gold.insert(ids->begin(), ids->end());
  }
  const std::vector<RecordId> required(gold.begin(), gold.end());
  for (std::size_t size : options.sizes) {
    // Validates every size before any run starts.
    (void)subsample_ids(reference.size(), required, size, options.seed);
  }

  for (int i = 0; i < options.warmup_runs; ++i) {
    (void)run_once(reference, tests, truth, required, options.sizes.front(), gateway, options);
  }
  std::vector<BenchRow> rows;
  rows.reserve(options.sizes.size());
  for (std::size_t size : options.sizes) {
    rows.push_back(run_once(reference, tests, truth, required, size, gateway, options));
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << kBenchCsvHeader << "\n";
  for (const BenchRow& r : rows) {
    out << r.corpus_size << ',' << fixed(r.embed_s, 6) << ',' << fixed(r.index_s, 6) << ','
        << fixed(r.retrieve_s, 6) << ',' << fixed(r.rerank_s, 6) << ',' << fixed(r.total_s, 6)
        << ',' << fixed(r.accuracy, 6) << ',' << fixed(r.queries_per_s, 1) << "\n";
  }
}

std::string format_bench_table(std::span<const BenchRow> rows, std::size_t jobs) {
  std::ostringstream out;
  const std::size_t n_queries = rows.empty() ? 0 : rows.front().n_queries;
  out << "queries " << n_queries << ", jobs " << jobs << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%12s %10s %10s %10s %10s %10s %9s %10s\n", "corpus",
                "embed_s", "index_s", "retrieve_s", "rerank_s", "total_s", "accuracy", "queries/s");
  out << line;
  for (const BenchRow& r : rows) {
    std::snprintf(line, sizeof line, "%12zu %10.3f %10.3f %10.3f %10.3f %10.3f %9.3f %10.1f\n",
                  r.corpus_size, r.embed_s, r.index_s, r.retrieve_s, r.rerank_s, r.total_s,
                  r.accuracy, r.queries_per_s);
    out << line;
  }
  return out.str();
}

}  // namespace reclink
