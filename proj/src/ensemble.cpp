// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/ensemble.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "reclink/error.hpp"

namespace reclink {
namespace {

std::size_t unique_ids(std::span<const RetrievalHit> hits) {
  std::unordered_set<RecordId> ids;
  for (const RetrievalHit& h : hits) ids.insert(h.record_id);
  return ids.size();
}

void recount(CandidateSet& set) {
  set.dense_count = 0;
  set.sparse_count = 0;
  for (const Candidate& c : set.hits) {
    set.dense_count += c.dense_score.has_value();
    set.sparse_count += c.sparse_score.has_value();
  }
  set.union_count = set.hits.size();
}

}  // namespace

CandidateSet merge_candidates(std::span<const RetrievalHit> dense,
                              std::span<const RetrievalHit> sparse, RecordId query_id) {
  CandidateSet set;
  set.query_id = query_id;
  std::unordered_map<RecordId, std::size_t> position;
  auto slot = [&](RecordId id) -> Candidate& {
    auto [it, inserted] = position.try_emplace(id, set.hits.size());
    if (inserted) set.hits.push_back({id, std::nullopt, std::nullopt, HitSource::kDense});
    return set.hits[it->second];
  };
  for (const RetrievalHit& h : dense) {
    Candidate& c = slot(h.record_id);
    if (!c.dense_score || h.score > *c.dense_score) c.dense_score = h.score;
  }
  for (const RetrievalHit& h : sparse) {
    Candidate& c = slot(h.record_id);
    if (!c.sparse_score || h.score > *c.sparse_score) c.sparse_score = h.score;
  }
  for (Candidate& c : set.hits) {
    c.source = c.dense_score && c.sparse_score ? HitSource::kBoth
               : c.dense_score               ? HitSource::kDense
                                             : HitSource::kSparse;
  }
  std::sort(set.hits.begin(), set.hits.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dense_score.has_value() != b.dense_score.has_value()) return a.dense_score.has_value();
    if (a.dense_score) return ranks_before(*a.dense_score, a.record_id, *b.dense_score, b.record_id);
    return ranks_before(*a.sparse_score, a.record_id, *b.sparse_score, b.record_id);
  });
  recount(set);

  const std::size_t d_unique = unique_ids(dense);
  const std::size_t s_unique = unique_ids(sparse);
  if (set.union_count < std::max(d_unique, s_unique) ||
      set.union_count > dense.size() + sparse.size()) {
    throw Error(ErrorKind::kBuild, "candidate union size " + std::to_string(set.union_count) +
                                       " violates bounds for |D|=" + std::to_string(dense.size()) +
                                       ", |S|=" + std::to_string(sparse.size()));
  }
  return set;
}

CandidateSet apply_blocking(CandidateSet set, const Record& query, const RecordSet& corpus) {
  if (!query.block_key) return set;
  std::erase_if(set.hits, [&](const Candidate& c) {
    const auto& key = corpus[c.record_id].block_key;
    return key && *key != *query.block_key;
  });
  recount(set);
  return set;
}

}  // namespace reclink
