// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/corpus.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "reclink/csv.hpp"
#include "reclink/error.hpp"
#include "reclink/text.hpp"

namespace reclink {
namespace {

using json = nlohmann::json;

std::string json_scalar_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_null()) return {};
  return value.dump();
}

RecordSet load_csv(const std::string& path, const LoadOptions& options) {
  const csv::Table table = csv::read_file(path);
  const int text_col = table.column(options.text_column);
  if (text_col < 0) {
    throw Error(ErrorKind::kSchema, path + ": missing column '" + options.text_column + "'");
  }
  int block_col = -1;
  if (options.block_column) {
    block_col = table.column(*options.block_column);
    if (block_col < 0) {
      throw Error(ErrorKind::kSchema, path + ": missing column '" + *options.block_column + "'");
    }
  }

  std::vector<Record> records;
  records.reserve(table.rows.size());
  for (const csv::Row& row : table.rows) {
    std::optional<std::string> key;
    if (block_col >= 0 && !row[block_col].empty()) key = row[block_col];
    Record rec = make_record(static_cast<RecordId>(records.size()), row[text_col], std::move(key));
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (static_cast<int>(c) == text_col || static_cast<int>(c) == block_col) continue;
      rec.extras.emplace(table.header[c], row[c]);
    }
    records.push_back(std::move(rec));
  }
  return RecordSet(std::move(records), path, options.role);
}

RecordSet load_jsonl(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);

  std::vector<Record> records;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++row;
    json object;
    try {
      object = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kFormat,
                  path + ": malformed JSON at row " + std::to_string(row) + ": " + e.what());
    }
    if (!object.is_object()) {
      throw Error(ErrorKind::kFormat,
                  path + ": row " + std::to_string(row) + " is not a JSON object");
    }
    const auto text = object.find(options.text_column);
    if (text == object.end()) {
      throw Error(ErrorKind::kSchema, path + ": missing column '" + options.text_column +
                                          "' at row " + std::to_string(row));
    }
    std::optional<std::string> key;
    if (options.block_column) {
      const auto block = object.find(*options.block_column);
      if (block != object.end() && !block->is_null()) key = json_scalar_text(*block);
      if (key && key->empty()) key.reset();
    }
    Record rec = make_record(static_cast<RecordId>(records.size()), json_scalar_text(*text),
                             std::move(key));
    for (const auto& [name, value] : object.items()) {
      if (name == options.text_column || (options.block_column && name == *options.block_column)) {
        continue;
      }
      rec.extras.emplace(name, json_scalar_text(value));
    }
    records.push_back(std::move(rec));
  }
  return RecordSet(std::move(records), path, options.role);
}

}  // namespace

Record make_record(RecordId id, std::string raw, std::optional<std::string> block_key) {
  Record rec;
  rec.id = id;
  rec.norm = normalize_text(raw);
  rec.raw = std::move(raw);
  rec.block_key = std::move(block_key);
  return rec;
}

RecordSet::RecordSet(std::vector<Record> records, std::string source_path, RecordRole role)
    : records_(std::move(records)), source_path_(std::move(source_path)), role_(role) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].id != i) {
      throw Error(ErrorKind::kBuild, "record ids must be contiguous from 0");
    }
  }
}

RecordSet RecordSet::from_strings(std::span<const std::string> raws, RecordRole role,
                                  std::span<const std::string> block_keys) {
  std::vector<Record> records;
  records.reserve(raws.size());
  for (std::size_t i = 0; i < raws.size(); ++i) {
    std::optional<std::string> key;
    if (i < block_keys.size() && !block_keys[i].empty()) key = block_keys[i];
    records.push_back(make_record(static_cast<RecordId>(i), raws[i], std::move(key)));
  }
  return RecordSet(std::move(records), "", role);
}

std::uint64_t RecordSet::fingerprint() const {
  std::uint64_t hash = fnv1a64("");
  for (const Record& rec : records_) {
    for (unsigned char c : rec.norm) {
      hash ^= c;
      hash *= 0x100000001b3ULL;
    }
    // 0xFF never occurs in UTF-8, so it separates records unambiguously.
    hash ^= 0xFF;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

RecordSet RecordSet::subset(std::span<const RecordId> keep) const {
  std::vector<Record> out;
  out.reserve(keep.size());
  for (RecordId id : keep) {
    Record rec = records_.at(id);
    rec.id = static_cast<RecordId>(out.size());
    out.push_back(std::move(rec));
  }
  return RecordSet(std::move(out), source_path_, role_);
}

FileFormat format_from_path(std::string_view path) {
  if (path.ends_with(".jsonl") || path.ends_with(".ndjson")) return FileFormat::kJsonl;
  return FileFormat::kCsv;
}

RecordSet load_records(const std::string& path, const LoadOptions& options) {
  return options.format == FileFormat::kJsonl ? load_jsonl(path, options)
                                              : load_csv(path, options);
}

}  // namespace reclink
