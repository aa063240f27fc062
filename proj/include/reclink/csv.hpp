// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace reclink::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;

  /// Index of a header column or -1.
  int column(std::string_view name) const;
};

/// RFC 4180 reader: first row is the header, CRLF or LF line endings, quoted
/// fields may contain commas, quotes ("") and newlines. A leading UTF-8 BOM is
/// skipped. Throws Error(kFormat) naming the 1-based data row on malformed
/// input (unterminated quote, stray quote, wrong field count).
Table parse(std::string_view content);

/// Reads and parses a file. Throws Error(kIo) if it cannot be opened.
Table read_file(const std::string& path);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

}  // namespace reclink::csv
