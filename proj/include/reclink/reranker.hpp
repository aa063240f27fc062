// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reclink/corpus.hpp"
#include "reclink/ensemble.hpp"
#include "reclink/error.hpp"
#include "reclink/gateway.hpp"

namespace reclink {

inline constexpr std::size_t kDefaultRerankBatch = 32;
inline constexpr std::size_t kDefaultLlmTopM = 10;
/// Backend scores this far outside [0, 1] are rejected; closer ones are clamped.
inline constexpr double kScoreTolerance = 1e-6;

struct ScoredCandidate {
  RecordId record_id = 0;
  double rerank_score = 0.0;  // in [0, 1]
  Candidate retrieval;
};

enum class Selector { kCrossEncoder, kLlm };

std::string_view to_string(Selector selector);

struct LinkageResult {
  RecordId query_id = 0;
  std::optional<RecordId> prediction;
  /// (rerank_score desc, record_id asc).
  std::vector<ScoredCandidate> scored;
  std::map<std::string, double> stage_timings;
  Selector selector = Selector::kCrossEncoder;
  /// The LLM stage ran but its answer was not used.
  bool llm_fallback = false;
  std::string llm_note;
  /// Top-1 fell below the abstention threshold.
  bool abstained = false;
  std::size_t dense_count = 0;
  std::size_t sparse_count = 0;
  std::size_t union_count = 0;
};

struct PairPrediction {
  RecordId query_id = 0;
  RecordId record_id = 0;
  double rerank_score = 0.0;
  double threshold = 0.0;
};

/// Gateway failure while scoring one query.
class RerankerError : public Error {
 public:
  RerankerError(RecordId query_id, const std::string& message)
      : Error(ErrorKind::kRerankerBackend, message), query_id_(query_id) {}
  RecordId query_id() const noexcept { return query_id_; }

 private:
  RecordId query_id_;
};

/// Scores every candidate against the query in gateway batches of
/// `batch_size` and returns them sorted by (score desc, record id asc).
/// Gateway failures become RerankerError; scores outside [0, 1] by more than
/// kScoreTolerance raise Error(kBackendContract).
std::vector<ScoredCandidate> rerank(const Record& query, const CandidateSet& candidates,
                                    const RecordSet& corpus, ModelGateway& gateway,
                                    const std::string& model,
                                    std::size_t batch_size = kDefaultRerankBatch);

/// Argmax by (score desc, record id asc); nothing for an empty list.
std::optional<RecordId> select_top1(std::span<const ScoredCandidate> scored);

struct LlmSelection {
  RecordId record_id = 0;
  bool fallback = false;
  std::string note;
};

/// Deterministic prompt for the selection model. The remote protocol sends
/// the query and candidates separately and the server renders this template.
std::string build_select_prompt(std::string_view query, std::span<const std::string> candidates);

/// Asks the selection model to pick among `top_m` (already in cross-encoder
/// order). Any failure or unusable answer falls back to select_top1 and is
/// reported through `fallback`/`note`.
LlmSelection llm_select(const Record& query, std::span<const ScoredCandidate> top_m,
                        const RecordSet& corpus, ModelGateway& gateway, const std::string& model);

/// Every (query, candidate) whose score is strictly above `tau`.
std::vector<PairPrediction> predict_pairs(std::span<const LinkageResult> results, double tau);

}  // namespace reclink
