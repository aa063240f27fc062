// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/sparse_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>

#include "binary_io.hpp"
#include "reclink/error.hpp"

namespace reclink {
namespace {

constexpr char kMagic[4] = {'E', 'N', 'L', 'S'};

std::map<std::string, std::uint32_t> count_grams(std::string_view text, int n_min, int n_max) {
  std::map<std::string, std::uint32_t> counts;
  for (std::string& gram : extract_ngrams(text, n_min, n_max)) ++counts[std::move(gram)];
  return counts;
}

void normalize_in_place(SparseVector& vec) {
  double sumsq = 0.0;
  for (const SparseEntry& e : vec) sumsq += e.weight * e.weight;
  if (sumsq <= 0.0) {
    vec.clear();
    return;
  }
  const double norm = std::sqrt(sumsq);
  for (SparseEntry& e : vec) e.weight /= norm;
}

[[noreturn]] void bad_file(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kFormat, path + ": " + what);
}

}  // namespace

std::string_view to_string(HitSource source) {
  switch (source) {
    case HitSource::kDense: return "dense";
    case HitSource::kSparse: return "sparse";
    case HitSource::kBoth: return "both";
  }
  return "unknown";
}

void sort_and_truncate(std::vector<RetrievalHit>& hits, std::size_t k) {
  auto order = [](const RetrievalHit& a, const RetrievalHit& b) {
    return ranks_before(a.score, a.record_id, b.score, b.record_id);
  };
  if (hits.size() > k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                      order);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), order);
  }
}

SparseIndex SparseIndex::build(const RecordSet& corpus, int n_min, int n_max) {
  if (corpus.empty()) throw Error(ErrorKind::kBuild, "cannot build a sparse index over an empty corpus");
  if (n_min < 1 || n_max < n_min) throw Error(ErrorKind::kConfig, "invalid n-gram range");

  SparseIndex index;
  index.n_min_ = n_min;
  index.n_max_ = n_max;
  index.fingerprint_ = corpus.fingerprint();

  const std::size_t n_docs = corpus.size();
  std::vector<std::map<std::string, std::uint32_t>> counts;
  counts.reserve(n_docs);
  std::map<std::string, std::uint32_t> doc_freq;
  for (const Record& rec : corpus) {
    counts.push_back(count_grams(rec.norm, n_min, n_max));
    for (const auto& [gram, _] : counts.back()) ++doc_freq[gram];
  }

  index.terms_.reserve(doc_freq.size());
  index.idf_.reserve(doc_freq.size());
  const double n = static_cast<double>(n_docs);
  for (const auto& [gram, df] : doc_freq) {
    index.terms_.push_back(gram);
    index.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0);
  }
  index.index_terms();

  index.doc_vectors_.resize(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    SparseVector& vec = index.doc_vectors_[d];
    vec.reserve(counts[d].size());
    // Map order is byte-lexicographic, which is ascending term id.
    for (const auto& [gram, tf] : counts[d]) {
      const TermId term = index.term_ids_.at(gram);
      vec.push_back({term, static_cast<double>(tf) * index.idf_[term]});
    }
    normalize_in_place(vec);
  }
  index.build_postings();
  index.cross_check();
  return index;
}

void SparseIndex::index_terms() {
  term_ids_.clear();
  term_ids_.reserve(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    term_ids_.emplace(terms_[t], static_cast<TermId>(t));
  }
}

void SparseIndex::build_postings() {
  postings_.assign(terms_.size(), {});
  for (std::size_t d = 0; d < doc_vectors_.size(); ++d) {
    for (const SparseEntry& e : doc_vectors_[d]) {
      postings_[e.term].push_back({static_cast<RecordId>(d), e.weight});
    }
  }
}

void SparseIndex::cross_check() const {
  std::vector<std::size_t> cursor(doc_vectors_.size(), 0);
  for (std::size_t t = 0; t < postings_.size(); ++t) {
    if (!(idf_[t] > 0.0)) throw Error(ErrorKind::kBuild, "non-positive idf for term " + terms_[t]);
    for (const Posting& p : postings_[t]) {
      if (p.record_id >= doc_vectors_.size()) {
        throw Error(ErrorKind::kBuild, "posting refers to unknown record");
      }
      const SparseVector& vec = doc_vectors_[p.record_id];
      std::size_t& at = cursor[p.record_id];
      if (at >= vec.size() || vec[at].term != t || vec[at].weight != p.weight) {
        throw Error(ErrorKind::kBuild, "postings disagree with document vectors");
      }
      ++at;
    }
  }
  for (std::size_t d = 0; d < doc_vectors_.size(); ++d) {
    if (cursor[d] != doc_vectors_[d].size()) {
      throw Error(ErrorKind::kBuild, "document vector terms missing from postings");
    }
  }
}

std::int64_t SparseIndex::term_id(std::string_view gram) const {
  const auto it = term_ids_.find(std::string(gram));
  return it == term_ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector SparseIndex::vectorize(std::string_view norm_text) const {
  SparseVector vec;
  for (const auto& [gram, tf] : count_grams(norm_text, n_min_, n_max_)) {
    const auto it = term_ids_.find(gram);
    if (it == term_ids_.end()) continue;
    vec.push_back({it->second, static_cast<double>(tf) * idf_[it->second]});
  }
  normalize_in_place(vec);
  return vec;
}

std::vector<RetrievalHit> SparseIndex::topk(std::string_view norm_text, std::size_t k) const {
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  const SparseVector query = vectorize(norm_text);
  if (query.empty()) return {};

  std::vector<double> acc(doc_vectors_.size(), 0.0);
  std::vector<RecordId> touched;
  std::vector<char> seen(doc_vectors_.size(), 0);
  for (const SparseEntry& q : query) {
    for (const Posting& p : postings_[q.term]) {
      if (!seen[p.record_id]) {
        seen[p.record_id] = 1;
        touched.push_back(p.record_id);
      }
      acc[p.record_id] += q.weight * p.weight;
    }
  }

  std::vector<RetrievalHit> hits;
  hits.reserve(touched.size());
  for (RecordId id : touched) {
    if (acc[id] > 0.0) hits.push_back({id, acc[id], HitSource::kSparse});
  }
  sort_and_truncate(hits, k);
  return hits;
}

void SparseIndex::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp);
    detail::BinaryWriter w(out);
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(n_min_));
    w.u32(static_cast<std::uint32_t>(n_max_));
    w.u64(doc_vectors_.size());
    w.u64(fingerprint_);
    w.u64(terms_.size());
    for (const std::string& term : terms_) w.str(term);
    for (double v : idf_) w.f64(v);
    for (const auto& list : postings_) {
      w.u64(list.size());
      for (const Posting& p : list) {
        w.u32(p.record_id);
        w.f64(p.weight);
      }
    }
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorKind::kIo, "cannot rename " + tmp + " to " + path);
  }
}

SparseIndex SparseIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  detail::BinaryReader r(in);

  char magic[4] = {};
  if (!r.bytes(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    bad_file(path, "not a sparse index file");
  }
  const std::uint32_t version = r.u32();
  if (!r.ok()) bad_file(path, "truncated header");
  if (version != kFormatVersion) {
    bad_file(path, "unsupported sparse index version " + std::to_string(version) + " (expected " +
                       std::to_string(kFormatVersion) + ")");
  }

  SparseIndex index;
  index.n_min_ = static_cast<int>(r.u32());
  index.n_max_ = static_cast<int>(r.u32());
  const std::uint64_t n_docs = r.u64();
  index.fingerprint_ = r.u64();
  const std::uint64_t n_terms = r.u64();
  // Each term costs at least 12 bytes on disk; bounds allocation for corrupt counts.
  if (!r.ok() || index.n_min_ < 1 || index.n_max_ < index.n_min_ || n_docs > (1ULL << 28) ||
      n_terms * 12 > file_size) {
    bad_file(path, "corrupt header");
  }

  index.terms_.reserve(n_terms);
  for (std::uint64_t t = 0; t < n_terms && r.ok(); ++t) index.terms_.push_back(r.str());
  index.idf_.reserve(n_terms);
  for (std::uint64_t t = 0; t < n_terms && r.ok(); ++t) index.idf_.push_back(r.f64());
  if (!r.ok()) bad_file(path, "truncated vocabulary");

  index.doc_vectors_.assign(n_docs, {});
  index.postings_.assign(n_terms, {});
  for (std::uint64_t t = 0; t < n_terms; ++t) {
    const std::uint64_t count = r.u64();
    if (!r.ok() || count > n_docs) bad_file(path, "truncated or corrupt postings");
    auto& list = index.postings_[t];
    list.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      const RecordId id = r.u32();
      const double weight = r.f64();
      if (!r.ok() || id >= n_docs) bad_file(path, "truncated or corrupt postings");
      list.push_back({id, weight});
      index.doc_vectors_[id].push_back({static_cast<TermId>(t), weight});
    }
  }
  if (!r.at_end()) bad_file(path, "trailing bytes after postings");
  index.index_terms();
  try {
    index.cross_check();
  } catch (const Error& e) {
    bad_file(path, e.what());
  }
  return index;
}

}  // namespace reclink
