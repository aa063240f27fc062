// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/reranker.hpp"

#include <algorithm>
#include <cmath>

namespace reclink {

std::string_view to_string(Selector selector) {
  return selector == Selector::kLlm ? "llm" : "cross_encoder";
}

std::vector<ScoredCandidate> rerank(const Record& query, const CandidateSet& candidates,
                                    const RecordSet& corpus, ModelGateway& gateway,
                                    const std::string& model, std::size_t batch_size) {
  if (batch_size == 0) throw Error(ErrorKind::kConfig, "rerank batch size must be positive");
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.hits.size());

  for (std::size_t start = 0; start < candidates.hits.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, candidates.hits.size() - start);
    std::vector<std::string> texts;
    texts.reserve(len);
    for (std::size_t i = start; i < start + len; ++i) {
      texts.push_back(corpus[candidates.hits[i].record_id].norm);
    }
    std::vector<double> scores;
    try {
      scores = gateway.rerank(query.norm, texts, model);
    } catch (const Error& e) {
      throw RerankerError(query.id, "reranking query " + std::to_string(query.id) + " failed: " +
                                        e.what());
    }
    for (std::size_t j = 0; j < len; ++j) {
      const double s = scores[j];
      if (!std::isfinite(s) || s < -kScoreTolerance || s > 1.0 + kScoreTolerance) {
        throw Error(ErrorKind::kBackendContract,
                    "reranker score " + std::to_string(s) + " for query " +
                        std::to_string(query.id) + " is outside [0, 1]");
      }
      const Candidate& c = candidates.hits[start + j];
      scored.push_back({c.record_id, std::clamp(s, 0.0, 1.0), c});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    return ranks_before(a.rerank_score, a.record_id, b.rerank_score, b.record_id);
  });
  return scored;
}

std::optional<RecordId> select_top1(std::span<const ScoredCandidate> scored) {
  if (scored.empty()) return std::nullopt;
  const auto best = std::min_element(
      scored.begin(), scored.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
        return ranks_before(a.rerank_score, a.record_id, b.rerank_score, b.record_id);
      });
  return best->record_id;
}

std::string build_select_prompt(std::string_view query, std::span<const std::string> candidates) {
  std::string prompt =
      "You are matching records that refer to the same real-world entity.\n"
      "Query: ";
  prompt.append(query);
  prompt.append("\nCandidates:\n");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    prompt.append(std::to_string(i + 1)).append(". ").append(candidates[i]).append("\n");
  }
  prompt.append("Answer with the number of the candidate that matches the query (1-");
  prompt.append(std::to_string(candidates.size()));
  prompt.append("). Reply with the number only.\n");
  return prompt;
}

LlmSelection llm_select(const Record& query, std::span<const ScoredCandidate> top_m,
                        const RecordSet& corpus, ModelGateway& gateway, const std::string& model) {
  if (top_m.empty()) throw Error(ErrorKind::kConfig, "llm_select requires at least one candidate");
  if (top_m.size() == 1) return {top_m.front().record_id, false, ""};

  const RecordId fallback = *select_top1(top_m);
  std::vector<std::string> texts;
  texts.reserve(top_m.size());
  for (const ScoredCandidate& c : top_m) texts.push_back(corpus[c.record_id].norm);
  try {
    const std::size_t index = gateway.select(query.norm, texts, model);
    return {top_m[index - 1].record_id, false, ""};
  } catch (const Error& e) {
    const std::string reason = e.kind() == ErrorKind::kSelectParse ? "invalid selection: "
                                                                   : "selection backend failed: ";
    return {fallback, true, reason + e.what()};
  }
}

std::vector<PairPrediction> predict_pairs(std::span<const LinkageResult> results, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorKind::kConfig, "tau must lie in [0, 1]");
  std::vector<PairPrediction> pairs;
  for (const LinkageResult& r : results) {
    for (const ScoredCandidate& c : r.scored) {
      if (c.rerank_score > tau) pairs.push_back({r.query_id, c.record_id, c.rerank_score, tau});
    }
  }
  return pairs;
}

}  // namespace reclink
