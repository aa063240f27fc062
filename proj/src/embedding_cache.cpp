// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/embedding_cache.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "binary_io.hpp"
#include "reclink/error.hpp"
#include "reclink/text.hpp"

namespace reclink {
namespace {

constexpr char kMagic[4] = {'E', 'N', 'L', 'K'};

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kCacheInvalid, "embedding cache " + path + " is invalid: " + what);
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::string model_id) : model_id_(std::move(model_id)) {}

EmbeddingCache::EmbeddingCache(EmbeddingCache&& other) noexcept
    : model_id_(std::move(other.model_id_)),
      path_(std::move(other.path_)),
      dim_(other.dim_),
      dirty_(other.dirty_),
      entries_(std::move(other.entries_)) {}

EmbeddingCache EmbeddingCache::open(const std::string& path, std::string model_id) {
  EmbeddingCache cache(std::move(model_id));
  cache.path_ = path;
  if (std::filesystem::exists(path)) cache.load_file();
  return cache;
}

void EmbeddingCache::load_file() {
  const std::string& path = *path_;
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  detail::BinaryReader r(in);

  char magic[4] = {};
  if (!r.bytes(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    invalid(path, "bad magic");
  }
  const std::uint32_t version = r.u32();
  if (!r.ok()) invalid(path, "truncated header");
  if (version != kFormatVersion) {
    invalid(path, "unsupported version " + std::to_string(version));
  }
  const std::string stored_model = r.str(1u << 16);
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  if (!r.ok()) invalid(path, "truncated header");
  if (stored_model != model_id_) {
    invalid(path, "written for model '" + stored_model + "', requested '" + model_id_ + "'");
  }
  const std::uint64_t entry_bytes = 12 + 4ULL * dim;
  if (dim == 0 && count > 0) invalid(path, "zero dimension");
  if (count > 0 && count > file_size / entry_bytes) invalid(path, "truncated entries");

  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t hash = r.u64();
    Entry entry;
    entry.text_length = r.u32();
    entry.vector.resize(dim);
    for (float& v : entry.vector) v = r.f32();
    if (!r.ok()) invalid(path, "truncated entries");
    entries_.insert_or_assign(hash, std::move(entry));
  }
  if (!r.at_end()) invalid(path, "trailing bytes");
  dim_ = dim;
}

std::optional<std::vector<float>> EmbeddingCache::lookup(std::string_view text) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find(fnv1a64(text));
  if (it == entries_.end() || it->second.text_length != text.size()) return std::nullopt;
  return it->second.vector;
}

void EmbeddingCache::store(std::string_view text, std::vector<float> vector) {
  std::unique_lock lock(mutex_);
  if (dim_ != 0 && vector.size() != dim_) {
    throw Error(ErrorKind::kCacheInvalid,
                "embedding dimension " + std::to_string(vector.size()) +
                    " does not match cached dimension " + std::to_string(dim_) + " for model '" +
                    model_id_ + "'");
  }
  dim_ = vector.size();
  entries_.insert_or_assign(fnv1a64(text),
                            Entry{static_cast<std::uint32_t>(text.size()), std::move(vector)});
  dirty_ = true;
}

void EmbeddingCache::flush() {
  std::unique_lock lock(mutex_);
  if (!path_ || !dirty_) return;
  std::vector<std::uint64_t> keys;
  keys.reserve(entries_.size());
  for (const auto& [hash, _] : entries_) keys.push_back(hash);
  std::sort(keys.begin(), keys.end());

  const std::string tmp = *path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp);
    detail::BinaryWriter w(out);
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(kFormatVersion);
    w.str(model_id_);
    w.u32(static_cast<std::uint32_t>(dim_));
    w.u64(keys.size());
    for (std::uint64_t hash : keys) {
      const Entry& entry = entries_.at(hash);
      w.u64(hash);
      w.u32(entry.text_length);
      for (float v : entry.vector) w.f32(v);
    }
    out.flush();
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path_->c_str()) != 0) {
    throw Error(ErrorKind::kIo, "cannot rename " + tmp + " to " + *path_);
  }
  dirty_ = false;
}

std::size_t EmbeddingCache::dim() const {
  std::shared_lock lock(mutex_);
  return dim_;
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace reclink
