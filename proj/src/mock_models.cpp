// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/mock_models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "reclink/text.hpp"

namespace reclink::mock {

std::vector<float> embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("embedding dim must be positive");
  std::vector<std::uint32_t> counts(dim, 0);
  for (const std::string& gram : extract_ngrams(text, kDefaultNgramMin, kDefaultNgramMax)) {
    ++counts[(fnv1a64(gram) ^ seed) % dim];
  }
  double sumsq = 0.0;
  for (std::uint32_t c : counts) sumsq += static_cast<double>(c) * static_cast<double>(c);
  std::vector<float> out(dim, 0.0f);
  if (sumsq == 0.0) return out;
  const double norm = std::sqrt(sumsq);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(counts[i] / norm);
  return out;
}

double ngram_jaccard(std::string_view a, std::string_view b) {
  const auto grams_a = extract_ngrams(a);
  const auto grams_b = extract_ngrams(b);
  const std::set<std::string> set_a(grams_a.begin(), grams_a.end());
  const std::set<std::string> set_b(grams_b.begin(), grams_b.end());
  if (set_a.empty() && set_b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const std::string& g : set_a) shared += set_b.count(g);
  const std::size_t uni = set_a.size() + set_b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

double lcs_ratio(std::string_view a, std::string_view b) {
  const std::vector<char32_t> x = utf8_decode(a);
  const std::vector<char32_t> y = utf8_decode(b);
  if (x.empty() && y.empty()) return 1.0;
  std::vector<std::size_t> prev(y.size() + 1, 0);
  std::vector<std::size_t> cur(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const std::size_t lcs = prev[y.size()];
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(x.size() + y.size());
}

double rerank_score(std::string_view query, std::string_view candidate) {
  const double score = 0.5 * ngram_jaccard(query, candidate) + 0.5 * lcs_ratio(query, candidate);
  return std::clamp(score, 0.0, 1.0);
}

std::size_t select(std::string_view query, std::span<const std::string> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select requires at least one candidate");
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = rerank_score(query, candidates[i]);
    if (s > best_score) {
      best_score = s;
      best = i;
    }
  }
  return best + 1;
}

}  // namespace reclink::mock
