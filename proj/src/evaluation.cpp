// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reclink/csv.hpp"
#include "reclink/error.hpp"
#include "reclink/random.hpp"
#include "reclink/text.hpp"

namespace reclink {
namespace {

template <class F>
auto staged(std::string_view stage, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

std::vector<RecordId> first_occurrences(const RecordSet& queries,
                                        const std::vector<std::string>& texts) {
  std::set<std::string, std::less<>> wanted(texts.begin(), texts.end());
  std::vector<RecordId> keep;
  keep.reserve(wanted.size());
  for (const Record& q : queries) {
    const auto it = wanted.find(q.norm);
    if (it == wanted.end()) continue;
    keep.push_back(q.id);
    wanted.erase(it);
  }
  return keep;
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

}  // namespace

void GroundTruth::add(std::string query_norm, RecordId reference_id) {
  by_query_[std::move(query_norm)].insert(reference_id);
}

const std::set<RecordId>* GroundTruth::find(std::string_view query_norm) const {
  const auto it = by_query_.find(query_norm);
  return it == by_query_.end() ? nullptr : &it->second;
}

std::size_t GroundTruth::pair_count() const {
  std::size_t n = 0;
  for (const auto& [query, ids] : by_query_) n += ids.size();
  return n;
}

std::set<LinkPair> GroundTruth::pairs(const std::set<std::string, std::less<>>* queries) const {
  std::set<LinkPair> out;
  for (const auto& [query, ids] : by_query_) {
    if (queries && !queries->contains(query)) continue;
    for (RecordId id : ids) out.emplace(query, id);
  }
  return out;
}

GroundTruth GroundTruth::remapped(const std::map<RecordId, RecordId>& remap) const {
  GroundTruth out;
  for (const auto& [query, ids] : by_query_) {
    for (RecordId id : ids) {
      const auto it = remap.find(id);
      if (it != remap.end()) out.add(query, it->second);
    }
  }
  return out;
}

GroundTruth load_ground_truth(const std::string& path, const RecordSet& reference) {
  const csv::Table table = csv::read_file(path);
  const int query_col = table.column("query");
  const int id_col = table.column("reference_id");
  const int text_col = table.column("reference");
  if (query_col < 0) throw Error(ErrorKind::kSchema, path + ": missing column 'query'");
  if (id_col < 0 && text_col < 0) {
    throw Error(ErrorKind::kSchema, path + ": needs a 'reference_id' or 'reference' column");
  }

  std::map<std::string, std::vector<RecordId>, std::less<>> by_norm;
  if (id_col < 0) {
    for (const Record& rec : reference) by_norm[rec.norm].push_back(rec.id);
  }

  GroundTruth truth;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const csv::Row& fields = table.rows[row];
    const std::string where = path + ": row " + std::to_string(row + 1);
    std::string query = normalize_text(fields[query_col]);
    if (id_col >= 0) {
      const std::string& cell = fields[id_col];
      RecordId id = 0;
      std::size_t used = 0;
      unsigned long long parsed = 0;
      try {
        parsed = std::stoull(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (cell.empty() || used != cell.size() || parsed >= reference.size()) {
        throw Error(ErrorKind::kEvaluation,
                    where + ": reference_id '" + cell + "' is not a reference row");
      }
      id = static_cast<RecordId>(parsed);
      truth.add(std::move(query), id);
    } else {
      const std::string norm = normalize_text(fields[text_col]);
      const auto it = by_norm.find(norm);
      if (it == by_norm.end()) {
        throw Error(ErrorKind::kEvaluation,
                    where + ": reference '" + fields[text_col] + "' matches no reference record");
      }
      if (it->second.size() > 1) {
        throw Error(ErrorKind::kEvaluation, where + ": reference '" + fields[text_col] +
                                                "' is ambiguous (" +
                                                std::to_string(it->second.size()) + " records)");
      }
      truth.add(std::move(query), it->second.front());
    }
  }
  return truth;
}

QuerySplit split_queries(std::vector<std::string> queries, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorKind::kConfig, "test fraction must lie in (0, 1)");
  }
  std::sort(queries.begin(), queries.end());
  queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
  if (queries.size() < 2) {
    throw Error(ErrorKind::kSplit, "need at least 2 unique queries to split, got " +
                                       std::to_string(queries.size()));
  }
  SplitMix64 rng(seed);
  for (std::size_t i = queries.size() - 1; i > 0; --i) {
    const std::size_t j = rng.below(i + 1);
    std::swap(queries[i], queries[j]);
  }
  const auto n_test = static_cast<std::size_t>(
      std::floor(static_cast<double>(queries.size()) * fraction + 1e-9));
  QuerySplit split;
  split.test.assign(queries.begin(), queries.begin() + static_cast<std::ptrdiff_t>(n_test));
  split.train.assign(queries.begin() + static_cast<std::ptrdiff_t>(n_test), queries.end());
  return split;
}

double top1_accuracy(std::span<const LinkageResult> results, const RecordSet& queries,
                     const GroundTruth& truth) {
  if (results.empty()) throw Error(ErrorKind::kEvaluation, "no results to evaluate");
  std::size_t correct = 0;
  for (const LinkageResult& r : results) {
    const std::string& norm = queries[r.query_id].norm;
    const std::set<RecordId>* ids = truth.find(norm);
    if (!ids) throw Error(ErrorKind::kEvaluation, "query '" + norm + "' has no ground truth");
    if (r.prediction && ids->contains(*r.prediction)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

PrfScores pair_level_prf(const std::set<LinkPair>& predicted, const std::set<LinkPair>& truth) {
  PrfScores s;
  s.predicted = predicted.size();
  s.actual = truth.size();
  for (const LinkPair& p : predicted) {
    if (truth.contains(p)) ++s.true_positives;
  }
  const auto tp = static_cast<double>(s.true_positives);
  s.precision = s.predicted == 0 ? 1.0 : tp / static_cast<double>(s.predicted);
  s.recall = s.actual == 0 ? 1.0 : tp / static_cast<double>(s.actual);
  const double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

std::set<LinkPair> to_link_pairs(std::span<const PairPrediction> predictions,
                                 const RecordSet& queries) {
  std::set<LinkPair> out;
  for (const PairPrediction& p : predictions) out.emplace(queries[p.query_id].norm, p.record_id);
  return out;
}

std::optional<RecordId> exact_match(const Record& query, const RecordSet& reference) {
  if (!query.retrievable()) return std::nullopt;
  for (const Record& rec : reference) {
    if (rec.norm == query.norm) return rec.id;
  }
  return std::nullopt;
}

RecordSet test_queries(const RecordSet& queries, const std::vector<std::string>& test) {
  return queries.subset(first_occurrences(queries, test));
}

EvalReport evaluate(const RecordSet& reference, const RecordSet& queries, const GroundTruth& truth,
                    ModelGateway& gateway, const EvalOptions& options, EmbeddingCache* cache) {
  EvalReport report;
  report.task = options.task;
  report.config.seed = options.seed;
  report.config.k = options.pipeline.k;
  report.config.test_fraction = options.test_fraction;
  report.config.backend = options.backend;
  report.config.embed_model = options.models.embed;
  report.config.rerank_model = options.models.rerank;
  report.config.select_model = options.models.select;
  report.config.llm_select = options.pipeline.llm_select;
  report.config.blocking = options.pipeline.blocking;
  report.config.jobs = options.pipeline.jobs;
  report.tau = options.tau;
  if (options.tau && !(*options.tau >= 0.0 && *options.tau <= 1.0)) {
    throw Error(ErrorKind::kConfig, "tau must lie in [0, 1]");
  }

  // Queries that normalize to nothing cannot be labelled and are left out.
  std::vector<std::string> unique;
  for (const Record& q : queries) {
    if (q.retrievable()) unique.push_back(q.norm);
  }
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  report.n_unique_queries = unique.size();

  const QuerySplit split = staged("split", [&] {
    return split_queries(unique, options.test_fraction, options.seed);
  });
  if (split.test.empty()) {
    throw Error(ErrorKind::kSplit, "split: test split is empty; raise the test fraction");
  }
  const std::vector<RecordId> original_ids = first_occurrences(queries, split.test);
  const RecordSet tests = queries.subset(original_ids);
  report.n_test = tests.size();

  Linker linker(reference, gateway, options.models, options.pipeline);
  staged("index", [&] { linker.build(cache); });
  const std::vector<LinkageResult> results = staged("link", [&] { return linker.link(tests, cache); });

  report.top1_accuracy = staged("metrics", [&] { return top1_accuracy(results, tests, truth); });

  std::size_t exact_correct = 0;
  std::size_t union_total = 0;
  for (const LinkageResult& r : results) {
    const Record& q = tests[r.query_id];
    const std::set<RecordId>& ids = *truth.find(q.norm);
    QueryOutcome outcome;
    outcome.query_id = original_ids[r.query_id];
    outcome.query = q.raw;
    outcome.prediction = r.prediction;
    outcome.correct = r.prediction && ids.contains(*r.prediction);
    const std::optional<RecordId> exact = exact_match(q, reference);
    outcome.exact_match_correct = exact && ids.contains(*exact);
    if (outcome.exact_match_correct) ++exact_correct;
    if (r.prediction) {
      for (const ScoredCandidate& c : r.scored) {
        if (c.record_id == *r.prediction) outcome.score = c.rerank_score;
      }
    }
    outcome.selector = std::string(to_string(r.selector));
    outcome.n_candidates = r.union_count;
    report.max_union = std::max(report.max_union, r.union_count);
    union_total += r.union_count;
    report.outcomes.push_back(std::move(outcome));
  }
  report.exact_match_accuracy =
      static_cast<double>(exact_correct) / static_cast<double>(results.size());
  report.mean_union = static_cast<double>(union_total) / static_cast<double>(results.size());

  if (options.tau) {
    const std::set<std::string, std::less<>> test_set(split.test.begin(), split.test.end());
    const std::vector<PairPrediction> pairs = predict_pairs(results, *options.tau);
    report.prf = pair_level_prf(to_link_pairs(pairs, tests), truth.pairs(&test_set));
  }
  return report;
}

EvalReport run_task(const TaskConfig& config) {
  const RecordSet reference = staged("reference", [&] {
    return load_records(config.reference_path, config.reference_load);
  });
  const RecordSet queries = staged("queries", [&] {
    return load_records(config.queries_path, config.query_load);
  });
  const GroundTruth truth = staged("truth", [&] {
    return load_ground_truth(config.truth_path, reference);
  });
  const std::unique_ptr<ModelGateway> gateway = make_gateway(config.gateway);
  std::optional<EmbeddingCache> cache;
  if (config.cache_path) {
    cache.emplace(staged("cache", [&] {
      return EmbeddingCache::open(*config.cache_path, config.gateway.embed_model);
    }));
  }
  return evaluate(reference, queries, truth, *gateway, config.eval, cache ? &*cache : nullptr);
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = task;
  j["n_unique_queries"] = n_unique_queries;
  j["n_test"] = n_test;
  j["top1_accuracy"] = top1_accuracy;
  j["exact_match_accuracy"] = exact_match_accuracy;
  if (tau && prf) {
    j["pair_level"] = {{"tau", *tau},
                       {"precision", prf->precision},
                       {"recall", prf->recall},
                       {"f1", prf->f1},
                       {"true_positives", prf->true_positives},
                       {"predicted", prf->predicted},
                       {"actual", prf->actual}};
  }
  j["candidates"] = {{"max_union", max_union}, {"mean_union", mean_union}};
  j["config"] = {{"seed", config.seed},
                 {"k", config.k},
                 {"test_fraction", config.test_fraction},
                 {"backend", config.backend},
                 {"embed_model", config.embed_model},
                 {"rerank_model", config.rerank_model},
                 {"select_model", config.select_model},
                 {"llm_select", config.llm_select},
                 {"blocking", config.blocking},
                 {"jobs", config.jobs}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const QueryOutcome& o : outcomes) {
    nlohmann::ordered_json row;
    row["query_id"] = o.query_id;
    row["query"] = o.query;
    row["prediction"] = o.prediction ? nlohmann::ordered_json(*o.prediction) : nlohmann::ordered_json();
    row["score"] = o.score;
    row["correct"] = o.correct;
    row["exact_match_correct"] = o.exact_match_correct;
    row["selector"] = o.selector;
    row["n_candidates"] = o.n_candidates;
    rows.push_back(std::move(row));
  }
  j["queries"] = std::move(rows);
  return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "task            " << task << "\n";
  out << "seed            " << config.seed << "\n";
  out << "k               " << config.k << "\n";
  out << "test fraction   " << fixed(config.test_fraction, 2) << "\n";
  out << "backend         " << config.backend << " (" << config.embed_model << ", "
      << config.rerank_model;
  if (config.llm_select) out << ", " << config.select_model;
  out << ")\n";
  out << "test queries    " << n_test << " of " << n_unique_queries << "\n";
  out << "\n";
  out << "method                 top-1 accuracy\n";
  out << "exact match            " << fixed(exact_match_accuracy, 3) << "\n";
  out << (config.llm_select ? "retrieve+rerank+llm    " : "retrieve+rerank        ")
      << fixed(top1_accuracy, 3) << "\n";
  if (tau && prf) {
    out << "\n";
    out << "pair level (tau " << fixed(*tau, 2) << ")  precision " << fixed(prf->precision, 3)
        << "  recall " << fixed(prf->recall, 3) << "  f1 " << fixed(prf->f1, 3) << "\n";
  }
  out << "\n";
  out << "candidates per query   max " << max_union << "  mean " << fixed(mean_union, 1) << "\n";
  return out.str();
}

}  // namespace reclink
