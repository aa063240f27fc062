// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reclink {

inline constexpr int kDefaultNgramMin = 2;
inline constexpr int kDefaultNgramMax = 4;

/// NFC, Unicode default case folding, whitespace runs collapsed to one
/// U+0020 and trimmed. Diacritics and non-Latin scripts are kept. Invalid
/// UTF-8 is replaced by U+FFFD. Idempotent.
std::string normalize_text(std::string_view raw);

/// Splits UTF-8 into one view per scalar value. Stray bytes that do not form
/// a valid sequence become single-byte units.
std::vector<std::string_view> utf8_scalars(std::string_view text);

std::vector<char32_t> utf8_decode(std::string_view text);

/// All contiguous substrings of n scalars for n in [n_min, n_max], ordered by
/// n then start position. A non-empty string shorter than n_min yields itself
/// as the only term, so one-character records stay indexable.
std::vector<std::string> extract_ngrams(std::string_view text, int n_min = kDefaultNgramMin,
                                        int n_max = kDefaultNgramMax);

/// FNV-1a, 64-bit, over raw bytes.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace reclink
