// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <vector>

#include "reclink/corpus.hpp"

namespace reclink {

inline constexpr std::size_t kDefaultTopK = 30;

enum class HitSource { kDense, kSparse, kBoth };

std::string_view to_string(HitSource source);

/// One retrieved reference record. Sparse scores lie in [0, 1], dense cosine
/// scores in [-1, 1].
struct RetrievalHit {
  RecordId record_id = 0;
  double score = 0.0;
  HitSource source = HitSource::kSparse;

  friend bool operator==(const RetrievalHit&, const RetrievalHit&) = default;
};

/// Ranking order used everywhere: score descending, then record id ascending.
inline bool ranks_before(double score_a, RecordId id_a, double score_b, RecordId id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

/// Sorts by ranking order and keeps the first k.
void sort_and_truncate(std::vector<RetrievalHit>& hits, std::size_t k);

}  // namespace reclink
