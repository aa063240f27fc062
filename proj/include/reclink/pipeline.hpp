// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reclink/corpus.hpp"
#include "reclink/dense_index.hpp"
#include "reclink/ensemble.hpp"
#include "reclink/gateway.hpp"
#include "reclink/reranker.hpp"
#include "reclink/sparse_index.hpp"

namespace reclink {

struct ModelIds {
  std::string embed = "mock-embed";
  std::string rerank = "mock-rerank";
  std::string select = "mock-select";

  static ModelIds from(const GatewayConfig& config) {
    return {config.embed_model, config.rerank_model, config.select_model};
  }
};

struct PipelineOptions {
  std::size_t k = kDefaultTopK;
  std::size_t embed_batch = kDefaultEmbedBatch;
  std::size_t rerank_batch = kDefaultRerankBatch;
  IndexMode dense_mode = IndexMode::kExact;
  ApproximateOptions approximate;
  bool blocking = false;
  bool llm_select = false;
  std::size_t llm_top_m = kDefaultLlmTopM;
  /// When set, a top-1 score below this value yields no prediction.
  std::optional<double> abstain_below;
  std::size_t jobs = 1;

  void validate() const;
};

/// Wall-clock seconds per stage of the most recent build()/link() calls.
struct StageTimings {
  double embed_s = 0.0;     // reference corpus embedding
  double index_s = 0.0;     // sparse + vector index construction
  double retrieve_s = 0.0;  // query embedding, dense + sparse top-k, merge
  double rerank_s = 0.0;    // cross-encoder scoring and selection
};

/// Runs `body(i)` for i in [0, n) on up to `jobs` threads. The exception
/// from the lowest failing index is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

/// Retrieve-and-rerank over one reference corpus: dense and sparse top-k,
/// candidate union, optional blocking, cross-encoder scoring, top-1 and an
/// optional LLM selection stage. Results do not depend on `jobs`.
class Linker {
 public:
  Linker(const RecordSet& reference, ModelGateway& gateway, ModelIds models,
         PipelineOptions options = {});

  /// Embeds the corpus (through `cache` when given) and builds both indexes.
  /// A prebuilt sparse index is used as-is when its corpus fingerprint
  /// matches.
  void build(EmbeddingCache* cache = nullptr, std::optional<SparseIndex> prebuilt = std::nullopt);

  std::vector<CandidateSet> retrieve(const RecordSet& queries, EmbeddingCache* cache = nullptr);
  std::vector<LinkageResult> rerank_all(const RecordSet& queries,
                                        std::span<const CandidateSet> candidates);
  /// retrieve + rerank_all.
  std::vector<LinkageResult> link(const RecordSet& queries, EmbeddingCache* cache = nullptr);

  const SparseIndex& sparse_index() const;
  const VectorIndex& vector_index() const;
  const StageTimings& timings() const noexcept { return timings_; }
  const EmbedStats& corpus_embed_stats() const noexcept { return corpus_stats_; }
  const PipelineOptions& options() const noexcept { return options_; }

 private:
  LinkageResult finish(const Record& query, const CandidateSet& candidates);

  const RecordSet& reference_;
  ModelGateway& gateway_;
  ModelIds models_;
  PipelineOptions options_;
  std::optional<SparseIndex> sparse_;
  std::optional<VectorIndex> dense_;
  StageTimings timings_;
  EmbedStats corpus_stats_;
};

}  // namespace reclink
