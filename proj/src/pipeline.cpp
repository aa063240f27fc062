// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "reclink/error.hpp"

namespace reclink {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void PipelineOptions::validate() const {
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  if (embed_batch == 0 || rerank_batch == 0) {
    throw Error(ErrorKind::kConfig, "batch sizes must be positive");
  }
  if (llm_top_m == 0) throw Error(ErrorKind::kConfig, "LLM top-m must be at least 1");
  if (abstain_below && !(*abstain_below >= 0.0 && *abstain_below <= 1.0)) {
    throw Error(ErrorKind::kConfig, "abstention threshold must lie in [0, 1]");
  }
  if (jobs == 0) throw Error(ErrorKind::kConfig, "jobs must be at least 1");
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = n;
  std::exception_ptr failure;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

Linker::Linker(const RecordSet& reference, ModelGateway& gateway, ModelIds models,
               PipelineOptions options)
    : reference_(reference), gateway_(gateway), models_(std::move(models)), options_(options) {
  options_.validate();
}

void Linker::build(EmbeddingCache* cache, std::optional<SparseIndex> prebuilt) {
  if (reference_.empty()) throw Error(ErrorKind::kBuild, "reference corpus is empty");

  auto start = Clock::now();
  std::vector<std::string> texts;
  texts.reserve(reference_.size());
  for (const Record& rec : reference_) texts.push_back(rec.norm);
  EmbeddingMatrix matrix = embed_with_cache(texts, models_.embed, cache, gateway_,
                                            options_.embed_batch, &corpus_stats_);
  timings_.embed_s = seconds_since(start);

  start = Clock::now();
  if (prebuilt && prebuilt->corpus_fingerprint() == reference_.fingerprint() &&
      prebuilt->corpus_size() == reference_.size()) {
    sparse_ = std::move(*prebuilt);
  } else {
    sparse_ = SparseIndex::build(reference_);
  }
  if (matrix.dim == 0) {
    // Every reference record is empty; keep a one-dimensional zero index.
    matrix.dim = 1;
    matrix.values.assign(matrix.rows(), 0.0f);
  }
  dense_ = VectorIndex::build(std::move(matrix), options_.dense_mode, options_.approximate);
  timings_.index_s = seconds_since(start);
}

const SparseIndex& Linker::sparse_index() const {
  if (!sparse_) throw Error(ErrorKind::kBuild, "linker used before build()");
  return *sparse_;
}

const VectorIndex& Linker::vector_index() const {
  if (!dense_) throw Error(ErrorKind::kBuild, "linker used before build()");
  return *dense_;
}

std::vector<CandidateSet> Linker::retrieve(const RecordSet& queries, EmbeddingCache* cache) {
  const SparseIndex& sparse = sparse_index();
  const VectorIndex& dense = vector_index();
  const auto start = Clock::now();

  std::vector<std::string> texts;
  texts.reserve(queries.size());
  for (const Record& q : queries) texts.push_back(q.norm);
  std::optional<EmbeddingMatrix> query_vectors;
  if (std::any_of(texts.begin(), texts.end(), [](const std::string& t) { return !t.empty(); })) {
    query_vectors = embed_with_cache(texts, models_.embed, cache, gateway_, options_.embed_batch);
  }
  const bool use_dense = dense.indexed_size() > 0 && query_vectors && query_vectors->dim != 0;
  if (use_dense && query_vectors->dim != dense.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "query embeddings have dimension " +
                                                   std::to_string(query_vectors->dim) +
                                                   ", index has " + std::to_string(dense.dim()));
  }

  std::vector<CandidateSet> out(queries.size());
  parallel_for(queries.size(), options_.jobs, [&](std::size_t i) {
    const Record& q = queries.records()[i];
    std::vector<RetrievalHit> dense_hits;
    if (use_dense && q.retrievable()) {
      dense_hits = dense.topk(query_vectors->row(i), options_.k);
    }
    const std::vector<RetrievalHit> sparse_hits = sparse.topk(q.norm, options_.k);
    CandidateSet set = merge_candidates(dense_hits, sparse_hits, q.id);
    if (options_.blocking) set = apply_blocking(std::move(set), q, reference_);
    out[i] = std::move(set);
  });
  timings_.retrieve_s = seconds_since(start);
  return out;
}

LinkageResult Linker::finish(const Record& query, const CandidateSet& candidates) {
  LinkageResult result;
  result.query_id = query.id;
  result.dense_count = candidates.dense_count;
  result.sparse_count = candidates.sparse_count;
  result.union_count = candidates.union_count;

  auto start = Clock::now();
  result.scored = rerank(query, candidates, reference_, gateway_, models_.rerank,
                         options_.rerank_batch);
  result.stage_timings["rerank"] = seconds_since(start);
  result.prediction = select_top1(result.scored);

  if (options_.llm_select && !result.scored.empty()) {
    start = Clock::now();
    const std::size_t m = std::min(options_.llm_top_m, result.scored.size());
    const LlmSelection choice =
        llm_select(query, std::span<const ScoredCandidate>(result.scored).first(m), reference_,
                   gateway_, models_.select);
    result.prediction = choice.record_id;
    result.llm_fallback = choice.fallback;
    result.llm_note = choice.note;
    result.selector = choice.fallback ? Selector::kCrossEncoder : Selector::kLlm;
    result.stage_timings["llm_select"] = seconds_since(start);
  }

  if (options_.abstain_below && result.prediction) {
    const auto chosen = std::find_if(result.scored.begin(), result.scored.end(),
                                     [&](const ScoredCandidate& c) {
                                       return c.record_id == *result.prediction;
                                     });
    if (chosen->rerank_score < *options_.abstain_below) {
      result.prediction.reset();
      result.abstained = true;
    }
  }
  return result;
}

std::vector<LinkageResult> Linker::rerank_all(const RecordSet& queries,
                                              std::span<const CandidateSet> candidates) {
  if (candidates.size() != queries.size()) {
    throw Error(ErrorKind::kConfig, "candidate sets do not line up with queries");
  }
  const auto start = Clock::now();
  std::vector<LinkageResult> out(queries.size());
  parallel_for(queries.size(), options_.jobs, [&](std::size_t i) {
    out[i] = finish(queries.records()[i], candidates[i]);
  });
  timings_.rerank_s = seconds_since(start);
  return out;
}

std::vector<LinkageResult> Linker::link(const RecordSet& queries, EmbeddingCache* cache) {
  const std::vector<CandidateSet> candidates = retrieve(queries, cache);
  return rerank_all(queries, candidates);
}

}  // namespace reclink
