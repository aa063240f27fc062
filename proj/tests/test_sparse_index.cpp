// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "errors.hpp"
#include "oracles.hpp"
#include "reclink/random.hpp"
#include "reclink/sparse_index.hpp"
#include "reclink/text.hpp"
#include "synthetic.hpp"

namespace reclink {
namespace {

using testing_util::error_kind;

RecordSet corpus_of(const std::vector<std::string>& raws) {
  return RecordSet::from_strings(raws, RecordRole::kReference);
}

std::vector<std::string> norms(const RecordSet& set) {
  std::vector<std::string> out;
  for (const Record& r : set) out.push_back(r.norm);
  return out;
}

void expect_matches_oracle(const RecordSet& corpus, const SparseIndex& index,
                           const std::string& query, std::size_t k) {
  const auto got = index.topk(query, k);
  const auto want = oracle::sparse_topk(norms(corpus), query, k);
  ASSERT_EQ(got.size(), want.size()) << "query '" << query << "'";
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].record_id, want[i].first) << "rank " << i << " query '" << query << "'";
    EXPECT_EQ(got[i].score, want[i].second) << "rank " << i << " query '" << query << "'";
  }
}

TEST(SparseIndex, SingleRecordIsUnitVector) {
  const SparseIndex index = SparseIndex::build(corpus_of({"ab"}));
  ASSERT_EQ(index.terms(), (std::vector<std::string>{"ab"}));
  ASSERT_EQ(index.doc_vector(0).size(), 1u);
  EXPECT_DOUBLE_EQ(index.doc_vector(0)[0].weight, 1.0);
}

TEST(SparseIndex, HandComputedWeights) {
  const SparseIndex index = SparseIndex::build(corpus_of({"abc", "abd"}));
  const auto ab = index.term_id("ab");
  const auto bc = index.term_id("bc");
  ASSERT_GE(ab, 0);
  ASSERT_GE(bc, 0);
  EXPECT_DOUBLE_EQ(index.idf()[ab], 1.0);
  EXPECT_DOUBLE_EQ(index.idf()[bc], 1.4054651081081644);
  EXPECT_LT(index.idf()[ab], index.idf()[bc]);

  std::map<std::string, double> doc0;
  for (const SparseEntry& e : index.doc_vector(0)) doc0[index.terms()[e.term]] = e.weight;
  ASSERT_EQ(doc0.size(), 3u);
  EXPECT_NEAR(doc0["ab"], 0.4494364165239821, 1e-15);
  EXPECT_NEAR(doc0["bc"], 0.6316672017376245, 1e-15);
  EXPECT_NEAR(doc0["abc"], 0.6316672017376245, 1e-15);
}

TEST(SparseIndex, TermIdsAreByteOrder) {
  const SparseIndex index = SparseIndex::build(corpus_of({"zebra", "apple", "émile"}));
  EXPECT_TRUE(std::is_sorted(index.terms().begin(), index.terms().end()));
  for (std::size_t d = 0; d < 3; ++d) {
    const SparseVector& v = index.doc_vector(static_cast<RecordId>(d));
    double ss = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) {
        EXPECT_LT(v[i - 1].term, v[i].term);
      }
      ss += v[i].weight * v[i].weight;
    }
    EXPECT_NEAR(ss, 1.0, 1e-12);
  }
}

TEST(SparseIndex, IdenticalRecordsHaveIdenticalVectors) {
  const SparseIndex index = SparseIndex::build(corpus_of({"queens ny", "bronx", "queens ny"}));
  const SparseVector& a = index.doc_vector(0);
  const SparseVector& b = index.doc_vector(2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].term, b[i].term);
    EXPECT_EQ(a[i].weight, b[i].weight);
  }
}

TEST(SparseIndex, SelfQueryRanksFirst) {
  const RecordSet corpus = corpus_of({"new york city", "new york", "york", "newark"});
  const SparseIndex index = SparseIndex::build(corpus);
  const auto hits = index.topk("new york", 30);
  ASSERT_FALSE(hits.empty());
  EXPECT_EQ(hits[0].record_id, 1u);
  EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
  EXPECT_EQ(hits[0].source, HitSource::kSparse);
}

TEST(SparseIndex, EmptyAndUnknownQueriesReturnNothing) {
  const SparseIndex index = SparseIndex::build(corpus_of({"alpha", "beta"}));
  EXPECT_TRUE(index.topk("", 5).empty());
  EXPECT_TRUE(index.topk("zzz", 5).empty());
  EXPECT_EQ(error_kind([&] { index.topk("alpha", 0); }), ErrorKind::kConfig);
}

TEST(SparseIndex, EmptyRecordsAreNeverReturned) {
  const SparseIndex index = SparseIndex::build(corpus_of({"", "abc", "   "}));
  EXPECT_TRUE(index.doc_vector(0).empty());
  const auto hits = index.topk("abc", 10);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].record_id, 1u);
}

TEST(SparseIndex, EmptyCorpusFails) {
  EXPECT_EQ(error_kind([] { SparseIndex::build(RecordSet{}); }), ErrorKind::kBuild);
}

TEST(SparseIndex, MatchesBruteForceOnRandomInstances) {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> raws;
    const std::size_t n = 1 + rng.below(60);
    for (std::size_t i = 0; i < n; ++i) raws.push_back(synth::short_string(rng, 7));
    const RecordSet corpus = corpus_of(raws);
    bool any = false;
    for (const Record& r : corpus) any = any || r.retrievable();
    if (!any) continue;
    const SparseIndex index = SparseIndex::build(corpus);
    for (std::size_t k : {1u, 5u, 30u}) {
      expect_matches_oracle(corpus, index, normalize_text(synth::short_string(rng, 7)), k);
    }
  }
}

TEST(SparseIndex, ScoresAreBoundedAndNonIncreasing) {
  const RecordSet corpus = corpus_of(synth::names(300, 5));
  const SparseIndex index = SparseIndex::build(corpus);
  SplitMix64 rng(9);
  for (int q = 0; q < 50; ++q) {
    const auto hits = index.topk(corpus[static_cast<RecordId>(rng.below(300))].norm, 30);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      EXPECT_GE(hits[i].score, 0.0);
      EXPECT_LE(hits[i].score, 1.0 + 1e-9);
      if (i > 0) {
        EXPECT_LE(hits[i].score, hits[i - 1].score);
      }
    }
  }
}

TEST(SparseIndex, RowPermutationKeepsScores) {
  std::vector<std::string> raws = synth::names(80, 17);
  const SparseIndex a = SparseIndex::build(corpus_of(raws));
  std::vector<std::string> reversed(raws.rbegin(), raws.rend());
  const SparseIndex b = SparseIndex::build(corpus_of(reversed));
  for (int q = 0; q < 20; ++q) {
    const std::string& query = raws[static_cast<std::size_t>(q) * 3];
    const auto ha = a.topk(query, 80);
    const auto hb = b.topk(query, 80);
    ASSERT_EQ(ha.size(), hb.size());
    std::multiset<std::pair<std::string, double>> sa;
    std::multiset<std::pair<std::string, double>> sb;
    for (const auto& h : ha) sa.emplace(raws[h.record_id], h.score);
    for (const auto& h : hb) sb.emplace(reversed[h.record_id], h.score);
    EXPECT_EQ(sa, sb);
  }
}

TEST(SparseIndexFile, RoundTrip) {
  synth::TempDir dir;
  const RecordSet corpus = corpus_of(synth::names(100, 3));
  const SparseIndex built = SparseIndex::build(corpus);
  built.save(dir.file("s.idx"));
  const SparseIndex loaded = SparseIndex::load(dir.file("s.idx"));
  EXPECT_EQ(loaded.terms(), built.terms());
  EXPECT_EQ(loaded.idf(), built.idf());
  EXPECT_EQ(loaded.corpus_fingerprint(), corpus.fingerprint());
  EXPECT_EQ(loaded.corpus_size(), corpus.size());
  for (const Record& r : corpus) {
    EXPECT_EQ(loaded.topk(r.norm, 30), built.topk(r.norm, 30));
  }
  built.save(dir.file("again.idx"));
  EXPECT_EQ(synth::read_text(dir.file("s.idx")), synth::read_text(dir.file("again.idx")));
}

TEST(SparseIndexFile, RejectsDamagedFiles) {
  synth::TempDir dir;
  const SparseIndex built = SparseIndex::build(corpus_of({"alpha", "beta", "gamma"}));
  built.save(dir.file("s.idx"));
  const std::string bytes = synth::read_text(dir.file("s.idx"));

  EXPECT_EQ(error_kind([&] { SparseIndex::load(dir.file("none.idx")); }), ErrorKind::kIo);

  std::string magic = bytes;
  magic[0] = 'X';
  synth::write_text(dir.file("magic.idx"), magic);
  EXPECT_EQ(error_kind([&] { SparseIndex::load(dir.file("magic.idx")); }), ErrorKind::kFormat);

  std::string version = bytes;
  version[4] = 99;
  synth::write_text(dir.file("version.idx"), version);
  EXPECT_EQ(error_kind([&] { SparseIndex::load(dir.file("version.idx")); }), ErrorKind::kFormat);

  for (std::size_t cut : {std::size_t{3}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    synth::write_text(dir.file("cut.idx"), bytes.substr(0, cut));
    EXPECT_EQ(error_kind([&] { SparseIndex::load(dir.file("cut.idx")); }), ErrorKind::kFormat)
        << "cut at " << cut;
  }
}

}  // namespace
}  // namespace reclink
