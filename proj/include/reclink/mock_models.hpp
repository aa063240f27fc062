// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Deterministic stand-ins for the embedding, reranking and selection models.
// Integer hashing and fixed summation order make them bit-reproducible.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reclink::mock {

inline constexpr std::size_t kDefaultEmbedDim = 256;

/// Each 2-4-gram is hashed with FNV-1a into bucket (hash ^ seed) % dim, the
/// bucket counts are accumulated and the vector is L2-normalized. The empty
/// string maps to the zero vector.
std::vector<float> embed(std::string_view text, std::size_t dim = kDefaultEmbedDim,
                         std::uint64_t seed = 0);

/// Jaccard overlap of the two 2-4-gram sets; 1 for two empty strings.
double ngram_jaccard(std::string_view a, std::string_view b);

/// 2 * LCS / (|a| + |b|) over Unicode scalars; 1 for two empty strings.
double lcs_ratio(std::string_view a, std::string_view b);

/// 0.5 * ngram_jaccard + 0.5 * lcs_ratio, clamped to [0, 1].
double rerank_score(std::string_view query, std::string_view candidate);

/// 1-based position of the highest rerank_score; ties go to the lowest index.
std::size_t select(std::string_view query, std::span<const std::string> candidates);

}  // namespace reclink::mock
