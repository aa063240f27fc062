// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reclink/embedding_cache.hpp"
#include "reclink/gateway.hpp"
#include "reclink/retrieval.hpp"

namespace reclink {

inline constexpr std::size_t kDefaultEmbedBatch = 64;

/// Row-major unit vectors, one row per input text. Rows for empty texts are
/// all zero and are never indexed.
struct EmbeddingMatrix {
  std::size_t dim = 0;
  std::vector<float> values;
  std::string model_id;
  std::vector<std::uint64_t> text_hashes;

  std::size_t rows() const noexcept { return text_hashes.size(); }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
};

struct EmbedStats {
  std::size_t cache_hits = 0;
  std::size_t embedded = 0;  // texts sent to the gateway
};

/// Embeds normalized texts, reusing cached vectors and sending only the
/// misses to the gateway in batches of `batch_size`. Gateway vectors are
/// always renormalized before they are cached or returned. New vectors are
/// flushed to the cache file before returning.
///
/// Throws kBackendUnavailable (with the miss count) when the gateway is down
/// and texts are uncached, and kCacheInvalid on a dimension clash between the
/// cache and the gateway. `cache` may be null.
EmbeddingMatrix embed_with_cache(std::span<const std::string> texts, const std::string& model_id,
                                 EmbeddingCache* cache, ModelGateway& gateway,
                                 std::size_t batch_size = kDefaultEmbedBatch,
                                 EmbedStats* stats = nullptr);

enum class IndexMode { kExact, kApproximate };

/// Tuning and calibration of the approximate (inverted-file) mode.
struct ApproximateOptions {
  std::size_t n_lists = 0;  // 0: round(sqrt(rows))
  int kmeans_iterations = 10;
  /// Calibration fails when recall is not reached by this fraction of lists.
  double max_probe_fraction = 0.5;
  double target_recall = 0.99;
  std::size_t recall_k = kDefaultTopK;
  std::size_t n_probes = 200;
  std::uint64_t seed = 42;
  /// Held-out probe vectors; when empty, perturbed corpus rows are used.
  std::vector<std::vector<float>> probes;
};

/// Cosine nearest-neighbour search over an EmbeddingMatrix.
///
/// Exact mode scans every row. Approximate mode clusters rows with spherical
/// k-means and scans the closest lists only; at build time the probe count is
/// calibrated against exact search and the build fails with kCalibration if
/// the target recall cannot be met.
class VectorIndex {
 public:
  /// Throws kBuild for an empty matrix.
  static VectorIndex build(EmbeddingMatrix embeddings, IndexMode mode = IndexMode::kExact,
                           const ApproximateOptions& options = {});

  /// Hits sorted by (cosine desc, record id asc). A zero query returns
  /// nothing. Throws kDimensionMismatch on a wrong-size query.
  std::vector<RetrievalHit> topk(std::span<const float> query, std::size_t k) const;
  std::vector<RetrievalHit> exact_topk(std::span<const float> query, std::size_t k) const;

  bool exact() const noexcept { return mode_ == IndexMode::kExact; }
  std::size_t dim() const noexcept { return embeddings_.dim; }
  std::size_t size() const noexcept { return embeddings_.rows(); }
  /// Rows with a nonzero vector; only these can be returned.
  std::size_t indexed_size() const noexcept { return indexed_.size(); }
  const EmbeddingMatrix& embeddings() const noexcept { return embeddings_; }
  std::size_t n_lists() const noexcept { return centroids_.size(); }
  std::size_t n_probe() const noexcept { return n_probe_; }
  double calibrated_recall() const noexcept { return calibrated_recall_; }

 private:
  VectorIndex() = default;
  void check_query(std::span<const float> query) const;
  std::vector<RetrievalHit> probe_topk(std::span<const float> query, std::size_t k,
                                       std::size_t n_probe) const;
  void train_lists(const ApproximateOptions& options);
  void calibrate(const ApproximateOptions& options);

  EmbeddingMatrix embeddings_;
  IndexMode mode_ = IndexMode::kExact;
  std::vector<RecordId> indexed_;  // rows with a nonzero vector
  std::vector<std::vector<float>> centroids_;
  std::vector<std::vector<RecordId>> lists_;
  std::size_t n_probe_ = 0;
  double calibrated_recall_ = 1.0;
};

/// Dot product accumulated in double, in index order.
double dot(std::span<const float> a, std::span<const float> b);

}  // namespace reclink
