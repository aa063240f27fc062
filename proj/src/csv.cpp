// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include "reclink/csv.hpp"

#include <fstream>
#include <sstream>

#include "reclink/error.hpp"

namespace reclink::csv {
namespace {

[[noreturn]] void malformed(std::size_t data_row, const std::string& what) {
  throw Error(ErrorKind::kFormat,
              "malformed CSV at row " + std::to_string(data_row) + ": " + what);
}

}  // namespace

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Table parse(std::string_view content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

  std::vector<Row> records;
  Row row;
  std::string field;
  bool in_quotes = false;
  bool after_quote = false;  // just closed a quoted field
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    after_quote = false;
  };
  auto end_row = [&] {
    if (!row_started && row.empty() && field.empty()) return;  // blank line
    end_field();
    records.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      row_started = true;
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
      end_row();
    } else if (c == '"') {
      if (!field.empty() || after_quote) {
        malformed(records.size(), "unexpected quote inside field");
      }
      in_quotes = true;
      row_started = true;
    } else {
      if (after_quote) {
        malformed(records.size(), "text after closing quote");
      }
      field.push_back(c);
      row_started = true;
    }
  }
  if (in_quotes) {
    malformed(records.size(), "unterminated quoted field");
  }
  if (row_started || !field.empty() || after_quote) end_row();

  Table table;
  if (records.empty()) {
    throw Error(ErrorKind::kFormat, "CSV input has no header row");
  }
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    Row& rec = records[r];
    if (rec.size() != table.header.size()) {
      malformed(r, "expected " + std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(rec.size()));
    }
    table.rows.push_back(std::move(rec));
  }
  return table;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

}  // namespace reclink::csv
