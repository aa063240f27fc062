// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "reclink/random.hpp"
#include "reclink/text.hpp"

namespace reclink {
namespace {

TEST(NormalizeText, CollapsesWhitespaceAndLowercases) {
  EXPECT_EQ(normalize_text("  New   York\tCity "), "new york city");
  EXPECT_EQ(normalize_text("OKC,\r\n OK"), "okc, ok");
}

TEST(NormalizeText, KeepsDiacriticsAndScripts) {
  EXPECT_EQ(normalize_text("Lutte ouvrière"), "lutte ouvrière");
  EXPECT_EQ(normalize_text("Sieť"), "sieť");
  EXPECT_EQ(normalize_text("ΑΘΗΝΑ"), "αθηνα");
  EXPECT_EQ(normalize_text("東京"), "東京");
}

TEST(NormalizeText, ComposesToNfc) {
  // "e" + combining acute composes to U+00E9.
  EXPECT_EQ(normalize_text("Caf\x65\xCC\x81"), "caf\xC3\xA9");
}

TEST(NormalizeText, FoldsCaseBeyondAscii) {
  EXPECT_EQ(normalize_text("STRASSE"), normalize_text("strasse"));
  EXPECT_EQ(normalize_text("Straße"), "strasse");
}

TEST(NormalizeText, EmptyAndBlank) {
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text(" \t\n "), "");
}

TEST(NormalizeText, IdempotentOnRandomInput) {
  const std::vector<std::string> pieces = {"A", "b", " ", "\t", "É", "e\xCC\x81", "ß", "Σ", "ς",
                                           "İ", "ﬁ", " ", "Ǆ", "x", "\xE2\x80\x83", "Ω"};
  SplitMix64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string s;
    const auto len = rng.below(12);
    for (std::uint64_t i = 0; i < len; ++i) s += pieces[rng.below(pieces.size())];
    const std::string once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once) << "input: " << s;
  }
}

TEST(NormalizeText, InvalidUtf8BecomesReplacementCharacter) {
  const std::string out = normalize_text("a\xFF" "b");
  EXPECT_EQ(out, "a\xEF\xBF\xBD" "b");
}

TEST(ExtractNgrams, ShortStrings) {
  EXPECT_EQ(extract_ngrams("ab"), (std::vector<std::string>{"ab"}));
  EXPECT_EQ(extract_ngrams("abc"), (std::vector<std::string>{"ab", "bc", "abc"}));
  EXPECT_EQ(extract_ngrams("a"), (std::vector<std::string>{"a"}));
  EXPECT_TRUE(extract_ngrams("").empty());
}

TEST(ExtractNgrams, CountsCodePointsNotBytes) {
  EXPECT_EQ(extract_ngrams("éa"), (std::vector<std::string>{"éa"}));
  EXPECT_EQ(extract_ngrams("é"), (std::vector<std::string>{"é"}));
}

TEST(ExtractNgrams, KeepsMultiplicityAndCrossesSpaces) {
  const auto grams = extract_ngrams("aa aa", 2, 2);
  EXPECT_EQ(grams, (std::vector<std::string>{"aa", "a ", " a", "aa"}));
}

TEST(ExtractNgrams, MatchesOracleOnRandomStrings) {
  SplitMix64 rng(11);
  const std::vector<std::string> alphabet = {"a", "b", " ", "é", "ш", "中", "z"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::string s;
    const auto len = rng.below(9);
    for (std::uint64_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    EXPECT_EQ(extract_ngrams(s), oracle::grams(s)) << s;
  }
}

TEST(ExtractNgrams, TypoKeepsMostGrams) {
  const auto a = extract_ngrams("montgomery");
  const auto b = extract_ngrams("montegomery");
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  std::size_t shared = 0;
  for (const auto& g : sa) shared += sb.count(g);
  const double jaccard = static_cast<double>(shared) / static_cast<double>(sa.size() + sb.size() - shared);
  EXPECT_DOUBLE_EQ(jaccard, oracle::jaccard("montgomery", "montegomery"));
  EXPECT_GT(jaccard, 0.5);
}

TEST(Utf8, ScalarsSplitStrayBytes) {
  const auto units = utf8_scalars("a\xC3\xA9\x80z");
  ASSERT_EQ(units.size(), 4u);
  EXPECT_EQ(units[1], "\xC3\xA9");
  EXPECT_EQ(units[2], "\x80");
}

TEST(Utf8, Decode) {
  EXPECT_EQ(utf8_decode("aé中"), (std::vector<char32_t>{U'a', U'é', U'中'}));
}

TEST(Fnv1a64, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(fnv1a64("new york"), oracle::fnv1a("new york"));
}

TEST(SplitMix64, ReferenceSequence) {
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng.next(), 6457827717110365317ULL);
  EXPECT_EQ(rng.next(), 3203168211198807973ULL);
  EXPECT_EQ(rng.next(), 9817491932198370423ULL);
}

}  // namespace
}  // namespace reclink
