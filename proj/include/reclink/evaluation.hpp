// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reclink/corpus.hpp"
#include "reclink/gateway.hpp"
#include "reclink/pipeline.hpp"
#include "reclink/reranker.hpp"

namespace reclink {

inline constexpr double kDefaultTestFraction = 0.4;
inline constexpr std::uint64_t kDefaultSeed = 42;

/// (query norm, reference id).
using LinkPair = std::pair<std::string, RecordId>;

/// True reference ids per normalized query text.
class GroundTruth {
 public:
  void add(std::string query_norm, RecordId reference_id);

  /// Nullptr when the query has no entry.
  const std::set<RecordId>* find(std::string_view query_norm) const;
  bool contains(std::string_view query_norm) const { return find(query_norm) != nullptr; }

  const std::map<std::string, std::set<RecordId>, std::less<>>& by_query() const noexcept {
    return by_query_;
  }
  std::size_t query_count() const noexcept { return by_query_.size(); }
  std::size_t pair_count() const;

  /// Every pair whose query is in `queries` (all pairs when null).
  std::set<LinkPair> pairs(const std::set<std::string, std::less<>>* queries = nullptr) const;

  /// Replaces reference ids through `remap`; ids without an entry are dropped.
  GroundTruth remapped(const std::map<RecordId, RecordId>& remap) const;

 private:
  std::map<std::string, std::set<RecordId>, std::less<>> by_query_;
};

/// Reads a CSV with a `query` column and either `reference_id` (0-based row
/// of the reference file) or `reference` (text resolved by exact normalized
/// match). Unknown ids, unresolved or ambiguous texts throw kEvaluation.
GroundTruth load_ground_truth(const std::string& path, const RecordSet& reference);

struct QuerySplit {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Sorts the unique queries bytewise, shuffles them with Fisher-Yates driven
/// by SplitMix64(seed) and takes the first floor(n * fraction) as test.
/// Fewer than two unique queries: kSplit. Fraction outside (0, 1): kConfig.
QuerySplit split_queries(std::vector<std::string> queries, double fraction, std::uint64_t seed);

/// Fraction of results whose prediction is a true reference of the query.
/// Results without a prediction count as wrong. A query absent from `truth`
/// throws kEvaluation naming it.
double top1_accuracy(std::span<const LinkageResult> results, const RecordSet& queries,
                     const GroundTruth& truth);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t actual = 0;
};

/// Set-based precision, recall and F1. Precision is 1 for an empty
/// prediction set, recall is 1 for an empty truth set, F1 is 0 when both
/// precision and recall are 0.
PrfScores pair_level_prf(const std::set<LinkPair>& predicted, const std::set<LinkPair>& truth);

/// Maps predictions to (query norm, reference id) pairs.
std::set<LinkPair> to_link_pairs(std::span<const PairPrediction> predictions,
                                 const RecordSet& queries);

/// Lowest-id reference whose normalized text equals the query's.
std::optional<RecordId> exact_match(const Record& query, const RecordSet& reference);

struct QueryOutcome {
  RecordId query_id = 0;
  std::string query;
  std::optional<RecordId> prediction;
  double score = 0.0;
  bool correct = false;
  bool exact_match_correct = false;
  std::string selector;
  std::size_t n_candidates = 0;
};

struct EvalConfigEcho {
  std::uint64_t seed = kDefaultSeed;
  std::size_t k = kDefaultTopK;
  double test_fraction = kDefaultTestFraction;
  std::string backend;
  std::string embed_model;
  std::string rerank_model;
  std::string select_model;
  bool llm_select = false;
  bool blocking = false;
  std::size_t jobs = 1;
};

struct EvalReport {
  std::string task;
  std::size_t n_unique_queries = 0;
  std::size_t n_test = 0;
  double top1_accuracy = 0.0;
  double exact_match_accuracy = 0.0;
  std::optional<double> tau;
  std::optional<PrfScores> prf;
  std::size_t max_union = 0;
  double mean_union = 0.0;
  EvalConfigEcho config;
  std::vector<QueryOutcome> outcomes;

  /// Stable, timing-free JSON; equal runs give equal bytes.
  std::string to_json() const;
  std::string to_table() const;
};

struct EvalOptions {
  std::string task = "task";
  double test_fraction = kDefaultTestFraction;
  std::uint64_t seed = kDefaultSeed;
  /// Adds pair-level metrics over candidates scored above this value.
  std::optional<double> tau;
  PipelineOptions pipeline;
  ModelIds models;
  std::string backend = "mock";
};

/// Splits the unique query texts, links the first record of each test query
/// against the full reference corpus and scores the predictions. Failures
/// are rethrown with the stage in the message.
EvalReport evaluate(const RecordSet& reference, const RecordSet& queries, const GroundTruth& truth,
                    ModelGateway& gateway, const EvalOptions& options,
                    EmbeddingCache* cache = nullptr);

/// The first record of each test query text, in file order.
RecordSet test_queries(const RecordSet& queries, const std::vector<std::string>& test);

struct TaskConfig {
  std::string reference_path;
  std::string queries_path;
  std::string truth_path;
  LoadOptions reference_load;
  LoadOptions query_load;
  GatewayConfig gateway;
  EvalOptions eval;
  std::optional<std::string> cache_path;
};

/// Loads the files named in `config` and runs evaluate().
EvalReport run_task(const TaskConfig& config);

}  // namespace reclink
