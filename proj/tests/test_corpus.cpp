// Copyright 2026 The reclink Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "reclink/corpus.hpp"
#include "reclink/csv.hpp"
#include "reclink/error.hpp"
#include "errors.hpp"
#include "synthetic.hpp"

namespace reclink {
namespace {

using testing_util::error_kind;
using testing_util::error_message;

TEST(Csv, QuotedFieldsAndLineEndings) {
  const auto t = csv::parse("\xEF\xBB\xBFtext,n\r\n\"a, \"\"b\"\"\",1\r\n\"multi\nline\",2\n");
  ASSERT_EQ(t.header, (csv::Row{"text", "n"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "a, \"b\"");
  EXPECT_EQ(t.rows[1][0], "multi\nline");
  EXPECT_EQ(t.column("n"), 1);
  EXPECT_EQ(t.column("missing"), -1);
}

TEST(Csv, SkipsBlankLinesButKeepsQuotedEmptyField) {
  const auto t = csv::parse("text\na\n\n\"\"\nb\n");
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[1][0], "");
}

TEST(Csv, ErrorsNameTheDataRow) {
  EXPECT_NE(error_message([] { csv::parse("a,b\n1,2\n3\n"); }).find("row 2"), std::string::npos);
  EXPECT_NE(error_message([] { csv::parse("a\n\"open\n"); }).find("row 1"), std::string::npos);
  EXPECT_EQ(error_kind([] { csv::parse("a\nx\"y\n"); }), ErrorKind::kFormat);
}

TEST(Csv, EscapeRoundTrip) {
  std::ostringstream out;
  csv::write_row(out, {"plain", "with,comma", "with \"quote\"", "line\nbreak"});
  const auto t = csv::parse("h1,h2,h3,h4\n" + out.str());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0], (csv::Row{"plain", "with,comma", "with \"quote\"", "line\nbreak"}));
}

TEST(LoadRecords, CsvKeepsRawAndOrder) {
  synth::TempDir dir;
  synth::write_text(dir.file("r.csv"), "name,state\n\"OKC, OK\",OK\n\"Queens, NY\",NY\n");
  LoadOptions opts;
  opts.text_column = "name";
  opts.block_column = "state";
  const RecordSet set = load_records(dir.file("r.csv"), opts);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set[0].id, 0u);
  EXPECT_EQ(set[1].id, 1u);
  EXPECT_EQ(set[0].raw, "OKC, OK");
  EXPECT_EQ(set[0].norm, "okc, ok");
  EXPECT_EQ(set[1].block_key, "NY");
}

TEST(LoadRecords, HeaderOnlyIsEmpty) {
  synth::TempDir dir;
  synth::write_text(dir.file("r.csv"), "text\n");
  LoadOptions opts;
  opts.text_column = "text";
  EXPECT_TRUE(load_records(dir.file("r.csv"), opts).empty());
}

TEST(LoadRecords, JsonlEnumeratesObjects) {
  synth::TempDir dir;
  synth::write_text(dir.file("r.jsonl"),
                    "{\"text\":\"A\",\"k\":1}\n{\"text\":\"B\"}\n\n{\"text\":\"C\",\"extra\":\"x\"}\n");
  LoadOptions opts;
  opts.format = format_from_path(dir.file("r.jsonl"));
  opts.text_column = "text";
  const RecordSet set = load_records(dir.file("r.jsonl"), opts);
  ASSERT_EQ(set.size(), 3u);
  EXPECT_EQ(set[2].id, 2u);
  EXPECT_EQ(set[2].raw, "C");
  EXPECT_EQ(set[2].extras.at("extra"), "x");
  EXPECT_EQ(set[0].extras.at("k"), "1");
}

TEST(LoadRecords, Errors) {
  synth::TempDir dir;
  LoadOptions opts;
  opts.text_column = "text";
  EXPECT_EQ(error_kind([&] { load_records(dir.file("missing.csv"), opts); }), ErrorKind::kIo);

  synth::write_text(dir.file("r.csv"), "name\nx\n");
  const std::string msg = error_message([&] { load_records(dir.file("r.csv"), opts); });
  EXPECT_NE(msg.find("'text'"), std::string::npos);
  EXPECT_EQ(error_kind([&] { load_records(dir.file("r.csv"), opts); }), ErrorKind::kSchema);

  synth::write_text(dir.file("bad.jsonl"), "{\"text\":\"a\"}\n{\"text\":\n");
  opts.format = FileFormat::kJsonl;
  EXPECT_EQ(error_kind([&] { load_records(dir.file("bad.jsonl"), opts); }), ErrorKind::kFormat);
  EXPECT_NE(error_message([&] { load_records(dir.file("bad.jsonl"), opts); }).find("row 2"),
            std::string::npos);
}

TEST(LoadRecords, DeterministicAndKeepsDuplicates) {
  synth::TempDir dir;
  synth::write_text(dir.file("r.csv"), "text\nSpringfield\nspringfield\n\" \"\n");
  LoadOptions opts;
  opts.text_column = "text";
  const RecordSet a = load_records(dir.file("r.csv"), opts);
  const RecordSet b = load_records(dir.file("r.csv"), opts);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[0].norm, a[1].norm);
  EXPECT_FALSE(a[2].retrievable());
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[static_cast<RecordId>(i)].raw, b[static_cast<RecordId>(i)].raw);
  }
}

TEST(RecordSet, FingerprintSeparatesRecords) {
  const std::vector<std::string> ab = {"ab", "c"};
  const std::vector<std::string> a_bc = {"a", "bc"};
  EXPECT_NE(RecordSet::from_strings(ab, RecordRole::kReference).fingerprint(),
            RecordSet::from_strings(a_bc, RecordRole::kReference).fingerprint());
}

TEST(RecordSet, SubsetRenumbers) {
  const std::vector<std::string> raws = {"a", "b", "c", "d"};
  const RecordSet set = RecordSet::from_strings(raws, RecordRole::kReference);
  const std::vector<RecordId> keep = {1, 3};
  const RecordSet sub = set.subset(keep);
  ASSERT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub[0].raw, "b");
  EXPECT_EQ(sub[1].id, 1u);
  EXPECT_EQ(sub[1].raw, "d");
}

}  // namespace
}  // namespace reclink
