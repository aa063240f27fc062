// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "reclink/corpus.hpp"
#include "reclink/retrieval.hpp"

namespace reclink {

/// A reference record in the merged candidate pool with whichever retrieval
/// scores produced it.
struct Candidate {
  RecordId record_id = 0;
  std::optional<double> dense_score;
  std::optional<double> sparse_score;
  HitSource source = HitSource::kSparse;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct CandidateSet {
  RecordId query_id = 0;
  std::vector<Candidate> hits;
  std::size_t dense_count = 0;   // candidates carrying a dense score
  std::size_t sparse_count = 0;  // candidates carrying a sparse score
  std::size_t union_count = 0;   // == hits.size()
};

/// Union of the dense and sparse lists, deduplicated by record id. A record in
/// both keeps both scores and is tagged kBoth. Order: dense cosine desc where
/// present, then sparse-only by sparse score desc, ties by record id.
///
/// Always checks max(|D|, |S|) <= union <= |D| + |S| over unique ids and
/// throws Error(kBuild) if the bound is broken.
CandidateSet merge_candidates(std::span<const RetrievalHit> dense,
                              std::span<const RetrievalHit> sparse, RecordId query_id = 0);

/// Drops candidates whose reference block key is present and differs from
/// the query's. Candidates without a key are kept. Identity when the query
/// has no key.
CandidateSet apply_blocking(CandidateSet set, const Record& query, const RecordSet& corpus);

}  // namespace reclink
