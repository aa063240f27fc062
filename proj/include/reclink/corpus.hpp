// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reclink {

using RecordId = std::uint32_t;

enum class RecordRole { kQuery, kReference };

enum class FileFormat { kCsv, kJsonl };

/// One row of a source file. `norm` always equals normalize_text(raw).
struct Record {
  RecordId id = 0;
  std::string raw;
  std::string norm;
  std::optional<std::string> block_key;
  std::map<std::string, std::string> extras;

  /// Empty-after-normalization records are kept but never retrieved.
  bool retrievable() const noexcept { return !norm.empty(); }
};

/// Builds a record with its normalized text filled in.
Record make_record(RecordId id, std::string raw, std::optional<std::string> block_key = {});

/// Immutable, row-ordered collection with ids 0..size()-1.
class RecordSet {
 public:
  RecordSet() = default;
  RecordSet(std::vector<Record> records, std::string source_path, RecordRole role);

  /// Assigns ids from position and fills `norm`.
  static RecordSet from_strings(std::span<const std::string> raws, RecordRole role,
                                std::span<const std::string> block_keys = {});

  const std::vector<Record>& records() const noexcept { return records_; }
  const Record& operator[](RecordId id) const { return records_.at(id); }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::string& source_path() const noexcept { return source_path_; }
  RecordRole role() const noexcept { return role_; }

  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  /// FNV-1a chained over every norm text; identifies a corpus for on-disk
  /// index reuse.
  std::uint64_t fingerprint() const;

  /// Keeps the listed records (ascending, unique) and renumbers them from 0.
  RecordSet subset(std::span<const RecordId> keep) const;

 private:
  std::vector<Record> records_;
  std::string source_path_;
  RecordRole role_ = RecordRole::kReference;
};

struct LoadOptions {
  FileFormat format = FileFormat::kCsv;
  std::string text_column;
  std::optional<std::string> block_column;
  RecordRole role = RecordRole::kReference;
};

/// Deduces the format from the extension: ".jsonl"/".ndjson" is JSONL,
/// anything else CSV.
FileFormat format_from_path(std::string_view path);

/// One record per data row, in file order. Missing file: kIo. Missing column:
/// kSchema naming it. Malformed row: kFormat with a 1-based row number.
RecordSet load_records(const std::string& path, const LoadOptions& options);

}  // namespace reclink
