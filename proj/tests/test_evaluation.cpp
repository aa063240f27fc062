// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "oracles.hpp"
#include "reclink/evaluation.hpp"
#include "reclink/random.hpp"
#include "reclink/text.hpp"
#include "synthetic.hpp"

namespace reclink {
namespace {

using testing_util::error_kind;
using testing_util::error_message;

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

RecordSet refs(const std::vector<std::string>& raws) {
  return RecordSet::from_strings(raws, RecordRole::kReference);
}

GroundTruth truth_of(const synth::TypoTask& task) {
  GroundTruth truth;
  for (std::size_t i = 0; i < task.queries.size(); ++i) {
    truth.add(normalize_text(task.queries[i]), static_cast<RecordId>(task.truth[i]));
  }
  return truth;
}

TEST(GroundTruth, PairsAndRemap) {
  GroundTruth truth;
  truth.add("a", 1);
  truth.add("a", 2);
  truth.add("b", 3);
  EXPECT_EQ(truth.query_count(), 2u);
  EXPECT_EQ(truth.pair_count(), 3u);
  EXPECT_TRUE(truth.contains("a"));
  EXPECT_EQ(truth.find("c"), nullptr);
  const std::set<std::string, std::less<>> only_b = {"b"};
  EXPECT_EQ(truth.pairs(&only_b), (std::set<LinkPair>{{"b", 3}}));
  const GroundTruth moved = truth.remapped({{2, 0}, {3, 1}});
  EXPECT_EQ(moved.pairs(), (std::set<LinkPair>{{"a", 0}, {"b", 1}}));
}

TEST(LoadGroundTruth, ByIdAndByText) {
  synth::TempDir dir;
  const RecordSet reference = refs({"Springfield", "Shelbyville", "Ogdenville"});
  synth::write_text(dir.file("ids.csv"), "query,reference_id\nSpringfeld,0\nShelbyvile,1\nSpringfeld,2\n");
  const GroundTruth by_id = load_ground_truth(dir.file("ids.csv"), reference);
  EXPECT_EQ(by_id.pairs(), (std::set<LinkPair>{{"springfeld", 0}, {"springfeld", 2}, {"shelbyvile", 1}}));

  synth::write_text(dir.file("text.csv"), "query,reference\nSPRINGFELD,springfield\n");
  EXPECT_EQ(load_ground_truth(dir.file("text.csv"), reference).pairs(),
            (std::set<LinkPair>{{"springfeld", 0}}));
}

TEST(LoadGroundTruth, Errors) {
  synth::TempDir dir;
  const RecordSet reference = refs({"a b", "A  B", "c d"});
  auto load = [&](const std::string& content) {
    synth::write_text(dir.file("t.csv"), content);
    return [&] { load_ground_truth(dir.file("t.csv"), reference); };
  };
  EXPECT_EQ(error_kind(load("q,reference_id\nx,0\n")), ErrorKind::kSchema);
  EXPECT_EQ(error_kind(load("query,other\nx,0\n")), ErrorKind::kSchema);
  EXPECT_EQ(error_kind(load("query,reference_id\nx,0\ny,3\n")), ErrorKind::kEvaluation);
  EXPECT_NE(error_message(load("query,reference_id\nx,0\ny,3\n")).find("row 2"), std::string::npos);
  EXPECT_EQ(error_kind(load("query,reference_id\nx,-1\n")), ErrorKind::kEvaluation);
  EXPECT_EQ(error_kind(load("query,reference_id\nx,1x\n")), ErrorKind::kEvaluation);
  EXPECT_EQ(error_kind(load("query,reference\nx,zz\n")), ErrorKind::kEvaluation);
  EXPECT_NE(error_message(load("query,reference\nx,a b\n")).find("ambiguous"), std::string::npos);
  EXPECT_EQ(error_kind([&] { load_ground_truth(dir.file("none.csv"), reference); }), ErrorKind::kIo);
}

TEST(SplitQueries, GoldenSeed42) {
  const std::string data = RECLINK_TEST_DATA_DIR;
  const auto queries = read_lines(data + "/split_queries.txt");
  ASSERT_EQ(queries.size(), 100u);
  const QuerySplit split = split_queries(queries, 0.4, 42);
  EXPECT_EQ(split.test, read_lines(data + "/split_seed42_test.txt"));
  EXPECT_EQ(split.train, read_lines(data + "/split_seed42_train.txt"));
}

TEST(SplitQueries, InputOrderAndDuplicatesDoNotMatter) {
  std::vector<std::string> q = {"d", "a", "c", "b", "e", "a", "c"};
  const QuerySplit a = split_queries(q, 0.4, 7);
  std::reverse(q.begin(), q.end());
  const QuerySplit b = split_queries(q, 0.4, 7);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test.size(), 2u);
}

TEST(SplitQueries, PartitionProperty) {
  SplitMix64 rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> q;
    const std::size_t n = 2 + rng.below(80);
    for (std::size_t i = 0; i < n; ++i) q.push_back("q" + std::to_string(rng.below(100)));
    std::set<std::string> unique(q.begin(), q.end());
    if (unique.size() < 2) continue;
    const double f = 0.05 + 0.9 * rng.unit();
    const QuerySplit split = split_queries(q, f, rng.next());
    EXPECT_EQ(split.test.size(),
              static_cast<std::size_t>(std::floor(static_cast<double>(unique.size()) * f + 1e-9)));
    std::set<std::string> joined(split.test.begin(), split.test.end());
    for (const auto& t : split.train) EXPECT_TRUE(joined.insert(t).second) << "overlap " << t;
    EXPECT_EQ(joined, unique);
  }
}

TEST(SplitQueries, Errors) {
  EXPECT_EQ(error_kind([] { split_queries({"a", "a"}, 0.4, 1); }), ErrorKind::kSplit);
  EXPECT_EQ(error_kind([] { split_queries({"a", "b"}, 0.0, 1); }), ErrorKind::kConfig);
  EXPECT_EQ(error_kind([] { split_queries({"a", "b"}, 1.0, 1); }), ErrorKind::kConfig);
}

TEST(Top1Accuracy, CountsCorrectPredictions) {
  const RecordSet queries = RecordSet::from_strings(std::vector<std::string>{"x", "y", "z"},
                                                    RecordRole::kQuery);
  GroundTruth truth;
  truth.add("x", 0);
  truth.add("y", 1);
  truth.add("y", 2);
  truth.add("z", 0);
  std::vector<LinkageResult> results(3);
  for (RecordId i = 0; i < 3; ++i) results[i].query_id = i;
  results[0].prediction = 0;
  results[1].prediction = 2;
  EXPECT_DOUBLE_EQ(top1_accuracy(results, queries, truth), 2.0 / 3.0);

  GroundTruth partial;
  partial.add("x", 0);
  EXPECT_NE(error_message([&] { top1_accuracy(results, queries, partial); }).find("'y'"),
            std::string::npos);
  EXPECT_EQ(error_kind([&] { top1_accuracy({}, queries, truth); }), ErrorKind::kEvaluation);
}

TEST(PairLevelPrf, EmptyConventions) {
  const std::set<LinkPair> none;
  const std::set<LinkPair> one = {{"a", 1}};
  PrfScores s = pair_level_prf(none, none);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(s.f1, 1.0);
  s = pair_level_prf(none, one);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.f1, 0.0);
  s = pair_level_prf(one, none);
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.recall, 1.0);
  s = pair_level_prf({{"b", 2}}, one);
  EXPECT_EQ(s.f1, 0.0);
}

TEST(PairLevelPrf, MatchesConfusionOracle) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    auto draw = [&] {
      std::set<LinkPair> out;
      const auto n = rng.below(12);
      for (std::uint64_t i = 0; i < n; ++i) {
        out.emplace("q" + std::to_string(rng.below(4)), static_cast<RecordId>(rng.below(4)));
      }
      return out;
    };
    const auto pred = draw();
    const auto truth = draw();
    const PrfScores got = pair_level_prf(pred, truth);
    const auto want = oracle::confusion(std::vector<LinkPair>(pred.begin(), pred.end()),
                                        std::vector<LinkPair>(truth.begin(), truth.end()));
    EXPECT_NEAR(got.precision, want.precision, 1e-12);
    EXPECT_NEAR(got.recall, want.recall, 1e-12);
    EXPECT_NEAR(got.f1, want.f1, 1e-12);
    EXPECT_GE(got.f1, 0.0);
    EXPECT_LE(got.f1, 1.0);
  }
}

TEST(PairLevelPrf, RecallFallsAsThresholdRises) {
  const synth::TypoTask task = synth::typo_task(150, 60, 3);
  const RecordSet reference = refs(task.reference);
  const RecordSet queries = RecordSet::from_strings(task.queries, RecordRole::kQuery);
  const GroundTruth truth = truth_of(task);
  MockGateway gateway;
  Linker linker(reference, gateway, {});
  linker.build();
  const auto results = linker.link(queries);
  double last_recall = 2.0;
  std::size_t last_predicted = SIZE_MAX;
  for (double tau = 0.0; tau <= 1.0; tau += 0.05) {
    const PrfScores s = pair_level_prf(to_link_pairs(predict_pairs(results, tau), queries), truth.pairs());
    EXPECT_LE(s.recall, last_recall);
    EXPECT_LE(s.predicted, last_predicted);
    last_recall = s.recall;
    last_predicted = s.predicted;
  }
}

TEST(ExactMatch, LowestIdWithEqualNorm) {
  const RecordSet reference = refs({"b", "A", "a"});
  const RecordSet q = RecordSet::from_strings(std::vector<std::string>{"a", "z"}, RecordRole::kQuery);
  EXPECT_EQ(exact_match(q[0], reference), 1u);
  EXPECT_FALSE(exact_match(q[1], reference));
}

TEST(TestQueries, FirstOccurrenceInFileOrder) {
  const RecordSet queries = RecordSet::from_strings(
      std::vector<std::string>{"b", "a", "B", "c", "a"}, RecordRole::kQuery);
  const RecordSet t = test_queries(queries, {"a", "b"});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].raw, "b");
  EXPECT_EQ(t[1].raw, "a");
}

TEST(Evaluate, TypoTaskEndToEnd) {
  const synth::TypoTask task = synth::typo_task(400, 150, 5);
  const RecordSet reference = refs(task.reference);
  std::vector<std::string> raws = task.queries;
  raws.push_back("   ");
  const RecordSet queries = RecordSet::from_strings(raws, RecordRole::kQuery);
  const GroundTruth truth = truth_of(task);

  EvalOptions options;
  options.task = "typos";
  options.tau = 0.5;
  MockGateway gateway;
  const EvalReport report = evaluate(reference, queries, truth, gateway, options);
  EXPECT_EQ(report.n_unique_queries, 150u);
  EXPECT_EQ(report.n_test, 60u);
  EXPECT_EQ(report.outcomes.size(), 60u);
  EXPECT_GE(report.top1_accuracy, 0.9);
  EXPECT_EQ(report.exact_match_accuracy, 0.0);
  EXPECT_LE(report.max_union, 60u);
  ASSERT_TRUE(report.prf);
  EXPECT_GT(report.prf->recall, 0.5);

  const nlohmann::json j = nlohmann::json::parse(report.to_json());
  EXPECT_EQ(j["task"], "typos");
  EXPECT_EQ(j["n_test"], 60);
  EXPECT_EQ(j["config"]["seed"], 42);
  EXPECT_EQ(j["config"]["k"], 30);
  EXPECT_EQ(j["pair_level"]["tau"], 0.5);
  EXPECT_EQ(j["queries"].size(), 60u);
  EXPECT_EQ(report.to_json().find("_s\""), std::string::npos);
  EXPECT_NE(report.to_table().find("typos"), std::string::npos);

  EvalOptions parallel = options;
  parallel.pipeline.jobs = 4;
  MockGateway other;
  EvalReport again = evaluate(reference, queries, truth, other, parallel);
  again.config.jobs = 1;
  EXPECT_EQ(again.to_json(), report.to_json());
}

TEST(Evaluate, StageErrors) {
  const RecordSet reference = refs({"alpha", "beta"});
  const RecordSet queries = RecordSet::from_strings(std::vector<std::string>{"alfa", "bta", "gama"},
                                                    RecordRole::kQuery);
  GroundTruth truth;
  MockGateway gateway;
  EvalOptions options;
  options.test_fraction = 0.9;
  const std::string msg = error_message([&] { evaluate(reference, queries, truth, gateway, options); });
  EXPECT_EQ(msg.rfind("metrics:", 0), 0u) << msg;
  EXPECT_EQ(error_kind([&] { evaluate(reference, queries, truth, gateway, options); }),
            ErrorKind::kEvaluation);

  options.test_fraction = 0.1;
  EXPECT_EQ(error_kind([&] { evaluate(reference, queries, truth, gateway, options); }),
            ErrorKind::kSplit);
  const RecordSet one = RecordSet::from_strings(std::vector<std::string>{"alfa", "ALFA"}, RecordRole::kQuery);
  options.test_fraction = 0.4;
  EXPECT_EQ(error_kind([&] { evaluate(reference, one, truth, gateway, options); }), ErrorKind::kSplit);
}

TEST(RunTask, LoadsFilesAndCaches) {
  synth::TempDir dir;
  const synth::TypoTask task = synth::typo_task(100, 40, 9);
  synth::write_records(dir.file("ref.csv"), task.reference);
  synth::write_records(dir.file("q.csv"), task.queries);
  synth::write_truth(dir.file("truth.csv"), task.queries, task.truth);
  TaskConfig config;
  config.reference_path = dir.file("ref.csv");
  config.queries_path = dir.file("q.csv");
  config.truth_path = dir.file("truth.csv");
  config.reference_load.text_column = "text";
  config.query_load.text_column = "text";
  config.cache_path = dir.file("e.cache");
  const EvalReport first = run_task(config);
  EXPECT_EQ(first.n_test, 16u);
  const EvalReport second = run_task(config);
  EXPECT_EQ(first.to_json(), second.to_json());
  EXPECT_EQ(EmbeddingCache::open(dir.file("e.cache"), "mock-embed").size(), 100u + 16u);
}

}  // namespace
}  // namespace reclink
