// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "reclink/corpus.hpp"
#include "reclink/evaluation.hpp"
#include "reclink/gateway.hpp"
#include "reclink/pipeline.hpp"

namespace reclink {

/// One corpus size of a scaling run. Times are wall-clock seconds.
struct BenchRow {
  std::size_t corpus_size = 0;
  double embed_s = 0.0;
  double index_s = 0.0;
  double retrieve_s = 0.0;
  double rerank_s = 0.0;
  double total_s = 0.0;
  double accuracy = 0.0;
  double queries_per_s = 0.0;
  std::size_t n_queries = 0;
};

struct BenchOptions {
  std::vector<std::size_t> sizes;
  std::uint64_t seed = kDefaultSeed;
  double test_fraction = kDefaultTestFraction;
  PipelineOptions pipeline;
  ModelIds models;
  /// Runs discarded before measuring, on the first size.
  int warmup_runs = 1;
};

/// Indices of a `size`-record subsample: every id in `required` plus a
/// seeded uniform fill, ascending. Throws kConfig when `size` exceeds the
/// corpus or cannot hold the required ids.
std::vector<RecordId> subsample_ids(std::size_t corpus_size, std::span<const RecordId> required,
                                    std::size_t size, std::uint64_t seed);

/// For each size (in order): subsample the reference corpus keeping every
/// true match of a test query, build fresh indexes, link the test queries
/// and time each stage. Embeddings are never cached between runs.
std::vector<BenchRow> run_scaling(const RecordSet& reference, const RecordSet& queries,
                                  const GroundTruth& truth, ModelGateway& gateway,
                                  const BenchOptions& options);

inline constexpr const char* kBenchCsvHeader =
    "corpus_size,embed_s,index_s,retrieve_s,rerank_s,total_s,accuracy,queries_per_s";

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);
std::string format_bench_table(std::span<const BenchRow> rows, std::size_t jobs);

}  // namespace reclink
