// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "reclink/corpus.hpp"
#include "reclink/retrieval.hpp"
#include "reclink/text.hpp"

namespace reclink {

using TermId = std::uint32_t;

struct SparseEntry {
  TermId term = 0;
  double weight = 0.0;
};

/// Sorted by ascending term id.
using SparseVector = std::vector<SparseEntry>;

struct Posting {
  RecordId record_id = 0;
  double weight = 0.0;
};

/// Character n-gram TF-IDF index over a reference corpus.
///
/// Term ids are the ranks of the n-grams in byte-lexicographic order, so
/// every weight and every dot product is accumulated in ascending term order.
/// tf is the raw count and idf(t) = ln((1 + N) / (1 + df(t))) + 1; each
/// document vector is L2-normalized. Records whose norm text is empty get an
/// empty vector and are never returned.
class SparseIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Throws Error(kBuild) for an empty corpus.
  static SparseIndex build(const RecordSet& corpus, int n_min = kDefaultNgramMin,
                           int n_max = kDefaultNgramMax);

  /// Query vector under the corpus idf. N-grams outside the vocabulary are
  /// dropped; the result is L2-normalized over the remaining terms.
  SparseVector vectorize(std::string_view norm_text) const;

  /// Top-k records by cosine similarity, (score desc, record id asc). Only
  /// records sharing at least one n-gram with the query are returned.
  /// Identical to a full scan over doc vectors.
  std::vector<RetrievalHit> topk(std::string_view norm_text, std::size_t k) const;

  std::size_t corpus_size() const noexcept { return doc_vectors_.size(); }
  std::size_t vocab_size() const noexcept { return terms_.size(); }
  int n_min() const noexcept { return n_min_; }
  int n_max() const noexcept { return n_max_; }
  std::uint64_t corpus_fingerprint() const noexcept { return fingerprint_; }

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  /// Term id of an n-gram, or -1.
  std::int64_t term_id(std::string_view gram) const;
  const SparseVector& doc_vector(RecordId id) const { return doc_vectors_.at(id); }
  const std::vector<Posting>& postings(TermId term) const { return postings_.at(term); }

  /// Versioned binary file: magic "ENLS", u32 version, then parameters,
  /// vocabulary, idf array and postings. Little-endian throughout.
  void save(const std::string& path) const;
  /// Throws kIo if unreadable and kFormat for a bad magic, a version
  /// mismatch, or truncation.
  static SparseIndex load(const std::string& path);

 private:
  SparseIndex() = default;
  void index_terms();
  void build_postings();
  /// Confirms postings and doc vectors encode the same data.
  void cross_check() const;

  int n_min_ = kDefaultNgramMin;
  int n_max_ = kDefaultNgramMax;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_ids_;
  std::vector<double> idf_;
  std::vector<SparseVector> doc_vectors_;
  std::vector<std::vector<Posting>> postings_;
};

}  // namespace reclink
