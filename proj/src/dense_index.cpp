// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "reclink/error.hpp"
#include "reclink/random.hpp"
#include "reclink/text.hpp"

namespace reclink {
namespace {

/// Unit-normalizes in place; returns false for a zero vector.
bool normalize(std::span<float> v) {
  double sumsq = 0.0;
  for (float x : v) sumsq += static_cast<double>(x) * static_cast<double>(x);
  if (!(sumsq > 0.0) || !std::isfinite(sumsq)) return false;
  const double norm = std::sqrt(sumsq);
  for (float& x : v) x = static_cast<float>(x / norm);
  return true;
}

bool is_zero(std::span<const float> v) {
  return std::all_of(v.begin(), v.end(), [](float x) { return x == 0.0f; });
}

}  // namespace

double dot(std::span<const float> a, std::span<const float> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

EmbeddingMatrix embed_with_cache(std::span<const std::string> texts, const std::string& model_id,
                                 EmbeddingCache* cache, ModelGateway& gateway,
                                 std::size_t batch_size, EmbedStats* stats) {
  if (batch_size == 0) throw Error(ErrorKind::kConfig, "embedding batch size must be positive");
  if (cache && cache->model_id() != model_id) {
    throw Error(ErrorKind::kCacheInvalid, "embedding cache belongs to model '" +
                                              cache->model_id() + "', not '" + model_id + "'");
  }

  const std::size_t n = texts.size();
  std::vector<std::vector<float>> rows(n);
  // Distinct uncached texts and the rows waiting on each.
  std::vector<std::string> misses;
  std::unordered_map<std::string, std::vector<std::size_t>> waiting;
  EmbedStats local;
  for (std::size_t i = 0; i < n; ++i) {
    if (texts[i].empty()) continue;
    if (cache) {
      if (auto hit = cache->lookup(texts[i])) {
        rows[i] = std::move(*hit);
        ++local.cache_hits;
        continue;
      }
    }
    auto [it, inserted] = waiting.try_emplace(texts[i]);
    if (inserted) misses.push_back(texts[i]);
    it->second.push_back(i);
  }

  std::size_t dim = cache ? cache->dim() : 0;
  for (std::size_t start = 0; start < misses.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, misses.size() - start);
    std::vector<std::vector<float>> batch;
    try {
      batch = gateway.embed(std::span<const std::string>(misses).subspan(start, len), model_id);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kBackendUnavailable) throw;
      throw Error(ErrorKind::kBackendUnavailable,
                  "embedding backend unavailable with " + std::to_string(misses.size() - start) +
                      " uncached texts: " + e.what());
    }
    for (std::size_t j = 0; j < len; ++j) {
      std::vector<float>& vec = batch[j];
      if (dim != 0 && vec.size() != dim) {
        throw Error(ErrorKind::kCacheInvalid,
                    "gateway returned dimension " + std::to_string(vec.size()) + ", expected " +
                        std::to_string(dim));
      }
      dim = vec.size();
      normalize(vec);
      const std::string& text = misses[start + j];
      if (cache) cache->store(text, vec);
      for (std::size_t row : waiting[text]) rows[row] = vec;
    }
    local.embedded += len;
  }
  if (cache) cache->flush();

  if (dim == 0) {
    for (const auto& r : rows) {
      if (!r.empty()) dim = r.size();
    }
  }
  EmbeddingMatrix matrix;
  matrix.dim = dim;
  matrix.model_id = model_id;
  matrix.values.assign(n * dim, 0.0f);
  matrix.text_hashes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    matrix.text_hashes[i] = fnv1a64(texts[i]);
    if (rows[i].empty()) continue;
    if (rows[i].size() != dim) {
      throw Error(ErrorKind::kCacheInvalid, "cached vector dimension differs from gateway's");
    }
    std::copy(rows[i].begin(), rows[i].end(), matrix.values.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  if (stats) *stats = local;
  return matrix;
}

VectorIndex VectorIndex::build(EmbeddingMatrix embeddings, IndexMode mode,
                               const ApproximateOptions& options) {
  if (embeddings.rows() == 0) throw Error(ErrorKind::kBuild, "cannot index an empty embedding matrix");
  if (embeddings.dim == 0 || embeddings.values.size() != embeddings.rows() * embeddings.dim) {
    throw Error(ErrorKind::kBuild, "embedding matrix shape is inconsistent");
  }
  VectorIndex index;
  index.embeddings_ = std::move(embeddings);
  index.mode_ = mode;
  for (std::size_t i = 0; i < index.embeddings_.rows(); ++i) {
    if (!is_zero(index.embeddings_.row(i))) index.indexed_.push_back(static_cast<RecordId>(i));
  }
  if (mode == IndexMode::kApproximate && !index.indexed_.empty()) {
    index.train_lists(options);
    index.calibrate(options);
  }
  return index;
}

void VectorIndex::check_query(std::span<const float> query) const {
  if (query.size() != embeddings_.dim) {
    throw Error(ErrorKind::kDimensionMismatch,
                "query dimension " + std::to_string(query.size()) + " does not match index dimension " +
                    std::to_string(embeddings_.dim));
  }
}

std::vector<RetrievalHit> VectorIndex::exact_topk(std::span<const float> query,
                                                  std::size_t k) const {
  check_query(query);
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  if (is_zero(query)) return {};
  std::vector<RetrievalHit> hits;
  hits.reserve(indexed_.size());
  for (RecordId id : indexed_) {
    hits.push_back({id, dot(query, embeddings_.row(id)), HitSource::kDense});
  }
  sort_and_truncate(hits, k);
  return hits;
}

std::vector<RetrievalHit> VectorIndex::topk(std::span<const float> query, std::size_t k) const {
  if (mode_ == IndexMode::kExact || indexed_.empty()) return exact_topk(query, k);
  return probe_topk(query, k, n_probe_);
}

std::vector<RetrievalHit> VectorIndex::probe_topk(std::span<const float> query, std::size_t k,
                                                  std::size_t n_probe) const {
  check_query(query);
  if (k == 0) throw Error(ErrorKind::kConfig, "k must be at least 1");
  if (is_zero(query)) return {};

  std::vector<std::pair<double, std::size_t>> lists;
  lists.reserve(centroids_.size());
  for (std::size_t c = 0; c < centroids_.size(); ++c) lists.emplace_back(dot(query, centroids_[c]), c);
  n_probe = std::min(n_probe, lists.size());
  std::partial_sort(lists.begin(), lists.begin() + static_cast<std::ptrdiff_t>(n_probe), lists.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });

  std::vector<RetrievalHit> hits;
  for (std::size_t p = 0; p < n_probe; ++p) {
    for (RecordId id : lists_[lists[p].second]) {
      hits.push_back({id, dot(query, embeddings_.row(id)), HitSource::kDense});
    }
  }
  sort_and_truncate(hits, k);
  return hits;
}

void VectorIndex::train_lists(const ApproximateOptions& options) {
  const std::size_t n = indexed_.size();
  const std::size_t dim = embeddings_.dim;
  std::size_t n_lists = options.n_lists;
  if (n_lists == 0) n_lists = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
  n_lists = std::clamp<std::size_t>(n_lists, 1, n);

  // Seeded partial Fisher-Yates over indexed rows picks the initial centroids.
  SplitMix64 rng(options.seed);
  std::vector<RecordId> pool = indexed_;
  centroids_.clear();
  for (std::size_t c = 0; c < n_lists; ++c) {
    const std::size_t j = c + rng.below(n - c);
    std::swap(pool[c], pool[j]);
    const auto row = embeddings_.row(pool[c]);
    centroids_.emplace_back(row.begin(), row.end());
  }

  std::vector<std::size_t> assignment(n, 0);
  for (int iter = 0; iter <= options.kmeans_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = embeddings_.row(indexed_[i]);
      double best = -2.0;
      for (std::size_t c = 0; c < n_lists; ++c) {
        const double s = dot(row, centroids_[c]);
        if (s > best) {
          best = s;
          assignment[i] = c;
        }
      }
    }
    if (iter == options.kmeans_iterations) break;
    std::vector<std::vector<double>> sums(n_lists, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> sizes(n_lists, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = embeddings_.row(indexed_[i]);
      auto& sum = sums[assignment[i]];
      for (std::size_t d = 0; d < dim; ++d) sum[d] += row[d];
      ++sizes[assignment[i]];
    }
    for (std::size_t c = 0; c < n_lists; ++c) {
      if (sizes[c] == 0) continue;  // keep the previous centroid
      std::vector<float> centroid(dim);
      for (std::size_t d = 0; d < dim; ++d) centroid[d] = static_cast<float>(sums[c][d] / sizes[c]);
      if (normalize(centroid)) centroids_[c] = std::move(centroid);
    }
  }

  lists_.assign(n_lists, {});
  for (std::size_t i = 0; i < n; ++i) lists_[assignment[i]].push_back(indexed_[i]);
}

void VectorIndex::calibrate(const ApproximateOptions& options) {
  const std::size_t dim = embeddings_.dim;
  std::vector<std::vector<float>> probes = options.probes;
  if (probes.empty()) {
    SplitMix64 rng(options.seed ^ 0x5DEECE66DULL);
    const std::size_t count = std::min(options.n_probes, indexed_.size());
    const float amplitude = static_cast<float>(0.5 / std::sqrt(static_cast<double>(dim)));
    for (std::size_t p = 0; p < count; ++p) {
      const auto row = embeddings_.row(indexed_[rng.below(indexed_.size())]);
      std::vector<float> probe(row.begin(), row.end());
      for (float& x : probe) x += amplitude * static_cast<float>(2.0 * rng.unit() - 1.0);
      normalize(probe);
      probes.push_back(std::move(probe));
    }
  }

  std::vector<std::vector<RetrievalHit>> truth;
  truth.reserve(probes.size());
  for (const auto& probe : probes) truth.push_back(exact_topk(probe, options.recall_k));

  auto recall_at = [&](std::size_t n_probe) {
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      if (truth[p].empty()) continue;
      const auto approx = probe_topk(probes[p], options.recall_k, n_probe);
      std::size_t found = 0;
      for (const RetrievalHit& t : truth[p]) {
        for (const RetrievalHit& a : approx) {
          if (a.record_id == t.record_id) {
            ++found;
            break;
          }
        }
      }
      total += static_cast<double>(found) / static_cast<double>(truth[p].size());
      ++counted;
    }
    return counted == 0 ? 1.0 : total / static_cast<double>(counted);
  };

  const auto max_probe = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(options.max_probe_fraction * static_cast<double>(centroids_.size()))));
  double recall = 0.0;
  for (std::size_t n_probe = 1;; n_probe = std::min(n_probe * 2, max_probe)) {
    recall = recall_at(n_probe);
    if (recall >= options.target_recall) {
      n_probe_ = n_probe;
      calibrated_recall_ = recall;
      return;
    }
    if (n_probe == max_probe) break;
  }
  throw Error(ErrorKind::kCalibration,
              "approximate index reached recall@" + std::to_string(options.recall_k) + " of " +
                  std::to_string(recall) + " with " + std::to_string(max_probe) + " of " +
                  std::to_string(centroids_.size()) + " lists; target " +
                  std::to_string(options.target_recall));
}

}  // namespace reclink
