// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace reclink {

/// Persistent store of unit embeddings keyed by (model id, FNV-1a hash of the
/// normalized text). The stored text byte length guards against hash
/// collisions. One file holds one model.
///
/// File layout, little-endian:
///   "ENLK" | u32 version | u32 model_id length | model_id bytes | u32 dim |
///   u64 count | count x (u64 text hash | u32 text length | dim x f32)
/// Entries are written in ascending hash order so equal contents give equal
/// bytes.
///
/// Reads may run concurrently; writes take an exclusive lock.
class EmbeddingCache {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// In-memory cache with no backing file.
  explicit EmbeddingCache(std::string model_id);

  /// Loads `path` when it exists, otherwise starts empty and creates it on
  /// the first flush(). A corrupt or truncated file, or one written for a
  /// different model, throws Error(kCacheInvalid).
  static EmbeddingCache open(const std::string& path, std::string model_id);

  EmbeddingCache(EmbeddingCache&& other) noexcept;
  EmbeddingCache& operator=(EmbeddingCache&&) = delete;
  EmbeddingCache(const EmbeddingCache&) = delete;
  EmbeddingCache& operator=(const EmbeddingCache&) = delete;

  std::optional<std::vector<float>> lookup(std::string_view text) const;

  /// Throws Error(kCacheInvalid) when the vector dimension differs from the
  /// cache's.
  void store(std::string_view text, std::vector<float> vector);

  /// Writes the file (temp file + rename) when there are unsaved entries.
  void flush();

  const std::string& model_id() const noexcept { return model_id_; }
  const std::optional<std::string>& path() const noexcept { return path_; }
  /// 0 until the first vector is stored or loaded.
  std::size_t dim() const;
  std::size_t size() const;

 private:
  struct Entry {
    std::uint32_t text_length = 0;
    std::vector<float> vector;
  };

  void load_file();

  std::string model_id_;
  std::optional<std::string> path_;
  std::size_t dim_ = 0;
  bool dirty_ = false;
  std::unordered_map<std::uint64_t, Entry> entries_;
  mutable std::shared_mutex mutex_;
};

}  // namespace reclink
