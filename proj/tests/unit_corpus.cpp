// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusqc/corpus.hpp"
#include "test_support.hpp"

namespace corpus = corpusqc::corpus;
using corpus::AudioTier;
using corpus::DatasetRecord;
using corpus::InventoryRow;
using corpus::SourceDescriptor;
using corpus::SourceFormat;
using corpus::SourceReader;

namespace {

SourceDescriptor descriptor(std::string path, SourceFormat format) {
  SourceDescriptor d;
  d.path = std::move(path);
  d.format = format;
  d.src_lang = "en";
  d.tgt_lang = "yo";
  return d;
}

std::vector<DatasetRecord> drain(SourceReader& reader) {
  std::vector<DatasetRecord> records;
  DatasetRecord record;
  while (reader.next(record)) records.push_back(record);
  return records;
}

}  // namespace

TEST_CASE("source format names round-trip") {
  for (SourceFormat f :
       {SourceFormat::kTsv2, SourceFormat::kJsonl, SourceFormat::kMono}) {
    CHECK(corpus::parse_source_format(corpus::source_format_name(f)) == f);
  }
  CHECK_THROWS_AS(corpus::parse_source_format("csv"), corpusqc::Error);
}

TEST_CASE("tsv2 reader splits strictly into two columns") {
  const auto dir = testsup::scratch_dir("corpus_tsv2");
  const auto path = dir / "pairs.tsv";
  testsup::write_file(path,
                      "hello\tbawo\r\n"
                      "one column only\n"
                      "a\tb\tc\n"
                      "second\tkeji\n");
  SourceReader reader(descriptor(path.string(), SourceFormat::kTsv2));
  const auto records = drain(reader);
  REQUIRE(records.size() == 2);
  CHECK(records[0].src_text == "hello");
  CHECK(records[0].tgt_text == "bawo");  // \r was stripped
  CHECK(records[0].id == path.string() + ":1");
  CHECK(records[0].src_lang == "en");
  CHECK(records[0].tgt_lang == "yo");
  CHECK(records[0].origin == path.string());
  CHECK(records[1].src_text == "second");
  CHECK(records[1].id == path.string() + ":4");

  REQUIRE(reader.malformed().size() == 2);
  CHECK(reader.malformed()[0].line_no == 2);
  CHECK(reader.malformed()[0].message.find("found 1") != std::string::npos);
  CHECK(reader.malformed()[1].line_no == 3);
  CHECK(reader.lines_read() == 4);
}

TEST_CASE("jsonl reader honours fallbacks and flags bad rows") {
  const auto dir = testsup::scratch_dir("corpus_jsonl");
  const auto path = dir / "rows.jsonl";
  testsup::write_file(
      path,
      R"({"id":"r1","src_lang":"fr","tgt_lang":"ha","src_text":"s","tgt_text":"t","origin":"upstream"})"
      "\n"
      "\n"
      R"({"src_text":"only source"})"
      "\n"
      R"({"tgt_text":"no source"})"
      "\n"
      "{broken\n");
  SourceReader reader(descriptor(path.string(), SourceFormat::kJsonl));
  const auto records = drain(reader);
  REQUIRE(records.size() == 2);
  CHECK(records[0].id == "r1");
  CHECK(records[0].src_lang == "fr");
  CHECK(records[0].tgt_lang == "ha");
  CHECK(records[0].origin == "upstream");
  // Fallbacks: descriptor languages, path:line id, file-path origin.
  CHECK(records[1].id == path.string() + ":3");
  CHECK(records[1].src_lang == "en");
  CHECK(records[1].tgt_lang == "yo");
  CHECK(records[1].tgt_text == "");
  CHECK(records[1].origin == path.string());

  REQUIRE(reader.malformed().size() == 2);
  CHECK(reader.malformed()[0].line_no == 4);
  CHECK(reader.malformed()[0].message.find("src_text") != std::string::npos);
  CHECK(reader.malformed()[1].line_no == 5);
}

TEST_CASE("mono reader skips blanks and leaves the target empty") {
  const auto dir = testsup::scratch_dir("corpus_mono");
  const auto path = dir / "lines.txt";
  testsup::write_file(path, "first\n\nsecond\n");
  auto d = descriptor(path.string(), SourceFormat::kMono);
  d.tgt_lang = "";
  SourceReader reader(d);
  const auto records = drain(reader);
  REQUIRE(records.size() == 2);
  CHECK(records[0].src_text == "first");
  CHECK(records[0].tgt_text == "");
  CHECK(records[0].tgt_lang == "");
  CHECK(records[1].id == path.string() + ":3");
  CHECK(reader.malformed().empty());
}

TEST_CASE("missing source files are fatal") {
  CHECK_THROWS_AS(
      SourceReader(descriptor("/nonexistent/nope.tsv", SourceFormat::kTsv2)),
      corpus::MissingFile);
}

TEST_CASE("deduper keeps first occurrence per language pair and text") {
  corpus::Deduper dedup;
  DatasetRecord a;
  a.src_lang = "en";
  a.tgt_lang = "yo";
  a.src_text = "hello";
  a.tgt_text = "bawo";
  a.origin = "f1";
  CHECK(dedup.keep(a.to_pair()));
  CHECK_FALSE(dedup.keep(a.to_pair()));

  // Different language pair, same text: kept.
  DatasetRecord b = a;
  b.tgt_lang = "ha";
  b.origin = "f2";
  CHECK(dedup.keep(b.to_pair()));

  // Field boundaries matter: "ab"+"c" is not "a"+"bc".
  DatasetRecord c1 = a;
  c1.src_text = "ab";
  c1.tgt_text = "c";
  DatasetRecord c2 = a;
  c2.src_text = "a";
  c2.tgt_text = "bc";
  CHECK(dedup.keep(c1.to_pair()));
  CHECK(dedup.keep(c2.to_pair()));

  const auto report = dedup.report();
  CHECK(report.kept == 4);
  CHECK(report.dropped == 1);
  CHECK(report.per_origin.at("f1").kept == 3);
  CHECK(report.per_origin.at("f1").dropped == 1);
  CHECK(report.per_origin.at("f2").kept == 1);
  CHECK(report.per_origin.at("f2").dropped == 0);
}

TEST_CASE("text tiers use closed lower bounds") {
  CHECK(corpus::classify_text_tier(2944.95) == 1);
  CHECK(corpus::classify_text_tier(2000.0) == 1);
  CHECK(corpus::classify_text_tier(1999.999) == 2);
  CHECK(corpus::classify_text_tier(900.0) == 2);
  CHECK(corpus::classify_text_tier(899.999) == 3);
  CHECK(corpus::classify_text_tier(250.0) == 3);
  CHECK(corpus::classify_text_tier(249.999) == 4);
  CHECK(corpus::classify_text_tier(0.0) == 4);
  CHECK_THROWS_AS(corpus::classify_text_tier(-0.1), corpus::NegativeCount);
}

TEST_CASE("audio tiers use closed lower bounds") {
  CHECK(corpus::classify_audio_tier(2000.0) == AudioTier::kHigh);
  CHECK(corpus::classify_audio_tier(1000.0) == AudioTier::kHigh);
  CHECK(corpus::classify_audio_tier(999.999) == AudioTier::kEstablished);
  CHECK(corpus::classify_audio_tier(500.0) == AudioTier::kEstablished);
  CHECK(corpus::classify_audio_tier(499.999) == AudioTier::kModerate);
  CHECK(corpus::classify_audio_tier(100.0) == AudioTier::kModerate);
  CHECK(corpus::classify_audio_tier(99.999) == AudioTier::kLow);
  CHECK(corpus::classify_audio_tier(0.0) == AudioTier::kLow);
  CHECK_THROWS_AS(corpus::classify_audio_tier(-1.0), corpus::NegativeCount);
  CHECK(std::string(corpus::audio_tier_name(AudioTier::kHigh)) == "High");
  CHECK(std::string(corpus::audio_tier_name(AudioTier::kLow)) == "Low");
}

TEST_CASE("manifest totals match a long-double oracle") {
  std::mt19937 rng(31415);
  std::uniform_real_distribution<double> tokens_pick(0.0, 3000.0);
  std::uniform_real_distribution<double> hours_pick(0.0, 1500.0);
  std::uniform_int_distribution<int> audio_pick(0, 3);

  std::vector<InventoryRow> rows;
  for (int i = 0; i < 200; ++i) {
    InventoryRow row;
    row.language = "lang" + std::to_string(i);
    row.tokens_millions = tokens_pick(rng);
    if (audio_pick(rng) != 0) row.audio_hours = hours_pick(rng);
    rows.push_back(std::move(row));
  }

  const auto manifest = corpus::build_manifest(rows);
  long double tokens = 0.0L, hours = 0.0L;
  std::size_t no_audio = 0;
  double max_tokens = 0.0, min_positive = 0.0;
  for (const auto& row : rows) {
    tokens += row.tokens_millions;
    if (row.audio_hours) {
      hours += *row.audio_hours;
    } else {
      ++no_audio;
    }
    max_tokens = std::max(max_tokens, row.tokens_millions);
    if (row.tokens_millions > 0.0 &&
        (min_positive == 0.0 || row.tokens_millions < min_positive)) {
      min_positive = row.tokens_millions;
    }
  }
  CHECK(manifest.total_tokens_millions ==
        doctest::Approx(static_cast<double>(tokens)).epsilon(1e-12));
  CHECK(manifest.total_audio_hours ==
        doctest::Approx(static_cast<double>(hours)).epsilon(1e-12));
  CHECK(manifest.language_count == rows.size());
  CHECK(manifest.languages_without_audio == no_audio);
  CHECK(manifest.disparity_ratio ==
        doctest::Approx(max_tokens / min_positive).epsilon(1e-12));
  REQUIRE(manifest.entries.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(manifest.entries[i].language == rows[i].language);
    CHECK(manifest.entries[i].text_tier ==
          corpus::classify_text_tier(rows[i].tokens_millions));
  }
}

TEST_CASE("manifest edge semantics") {
  // Zero recorded hours is still audio; absent audio is different.
  std::vector<InventoryRow> rows = {{"a", 10.0, 0.0}, {"b", 5.0, std::nullopt}};
  const auto manifest = corpus::build_manifest(rows);
  CHECK(manifest.languages_without_audio == 1);
  REQUIRE(manifest.entries[0].audio_tier.has_value());
  CHECK(*manifest.entries[0].audio_tier == AudioTier::kLow);
  CHECK_FALSE(manifest.entries[1].audio_tier.has_value());
  CHECK(manifest.disparity_ratio == doctest::Approx(2.0));

  // Zero-token rows do not define the disparity floor.
  std::vector<InventoryRow> with_zero = {
      {"a", 10.0, std::nullopt}, {"b", 0.5, std::nullopt}, {"c", 0.0, std::nullopt}};
  CHECK(corpus::build_manifest(with_zero).disparity_ratio ==
        doctest::Approx(20.0));

  // All-zero corpora leave the ratio undefined (0).
  std::vector<InventoryRow> zeros = {{"a", 0.0, std::nullopt}};
  CHECK(corpus::build_manifest(zeros).disparity_ratio == 0.0);

  std::vector<InventoryRow> dup = {{"a", 1.0, std::nullopt},
                                   {"a", 2.0, std::nullopt}};
  CHECK_THROWS_AS(corpus::build_manifest(dup), corpus::DuplicateLanguage);
}

TEST_CASE("inventory file parsing") {
  const auto dir = testsup::scratch_dir("corpus_inventory");
  const auto path = dir / "inv.tsv";
  testsup::write_file(path,
                      "# language\ttokens\thours\n"
                      "Amharic\t2944.95\t238.00\n"
                      "Rundi\t182.67\t-\n"
                      "\n");
  const auto rows = corpus::load_inventory(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].language == "Amharic");
  CHECK(rows[0].tokens_millions == doctest::Approx(2944.95));
  REQUIRE(rows[0].audio_hours.has_value());
  CHECK(*rows[0].audio_hours == doctest::Approx(238.0));
  CHECK(rows[1].language == "Rundi");
  CHECK_FALSE(rows[1].audio_hours.has_value());

  testsup::write_file(dir / "bad.tsv", "only\ttwo\n");
  CHECK_THROWS_AS(corpus::load_inventory(dir / "bad.tsv"), corpusqc::Error);
  CHECK_THROWS_AS(corpus::load_inventory(dir / "missing.tsv"),
                  corpus::MissingFile);
}

TEST_CASE("manifest serializations") {
  std::vector<InventoryRow> rows = {{"Amharic", 2944.95, 238.0},
                                    {"Rundi", 182.67, std::nullopt}};
  const auto manifest = corpus::build_manifest(rows);

  const auto j = corpus::manifest_to_json(manifest);
  REQUIRE(j.at("entries").size() == 2);
  CHECK(j.at("entries")[0].at("text_tier") == 1);
  CHECK(j.at("entries")[0].at("audio_tier") == "Moderate");
  CHECK(j.at("entries")[1].at("audio_hours").is_null());
  CHECK(j.at("entries")[1].at("audio_tier").is_null());
  CHECK(j.at("totals").at("language_count") == 2);
  CHECK(j.at("languages_without_audio") == 1);

  const std::string table = corpus::manifest_table(manifest);
  CHECK(table.find("Amharic") != std::string::npos);
  CHECK(table.find("TOTAL") != std::string::npos);
  CHECK(table.find("languages without audio: 1") != std::string::npos);
  CHECK(table.find("disparity ratio (max/min tokens):") != std::string::npos);

  const std::string svg = corpus::manifest_svg_tokens(manifest);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("Amharic") != std::string::npos);
  CHECK(corpus::manifest_svg_hours(manifest).find("<svg") !=
        std::string::npos);
}

TEST_CASE("export and re-ingest round-trips records bit-identically") {
  const auto dir = testsup::scratch_dir("corpus_roundtrip");
  const auto path = dir / "export.jsonl";

  std::mt19937 rng(2718);
  std::vector<DatasetRecord> records;
  for (int i = 0; i < 300; ++i) {
    DatasetRecord r;
    r.id = "rec-" + std::to_string(i);
    r.src_lang = i % 3 == 0 ? "en" : "fr";
    r.tgt_lang = i % 2 == 0 ? "yo" : "ha";
    r.src_text = testsup::random_pathological_text(rng);
    r.tgt_text = testsup::random_pathological_text(rng);
    r.origin = "gen";
    records.push_back(std::move(r));
  }
  CHECK(corpus::export_records(records, path) == records.size());

  SourceDescriptor d;
  d.path = path.string();
  d.format = SourceFormat::kJsonl;
  SourceReader reader(d);
  const auto back = drain(reader);
  CHECK(reader.malformed().empty());
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].id == records[i].id);
    CHECK(back[i].src_lang == records[i].src_lang);
    CHECK(back[i].tgt_lang == records[i].tgt_lang);
    CHECK(back[i].src_text == records[i].src_text);
    CHECK(back[i].tgt_text == records[i].tgt_text);
    CHECK(back[i].origin == records[i].origin);
  }

  // Exporting what came back reproduces the file byte for byte.
  std::ostringstream second;
  corpus::export_records(back, second);
  CHECK(second.str() == testsup::read_file(path));
}

TEST_CASE("exported verdicts serialize alongside the record") {
  DatasetRecord r;
  r.id = "v1";
  r.src_lang = "en";
  r.tgt_lang = "yo";
  r.src_text = "s";
  r.tgt_text = "t";
  r.origin = "o";
  corpusqc::statval::ValidationVerdict verdict;
  verdict.id = "v1";
  verdict.accepted = false;
  verdict.ratio = 2.5;
  verdict.overlap = 0.1;
  verdict.reasons = {corpusqc::statval::Reason::kRatioOutOfFence};
  r.verdict = verdict;

  std::ostringstream out;
  const std::vector<DatasetRecord> one = {r};
  corpus::export_records(one, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.at("verdict").at("accepted") == false);
  CHECK(j.at("verdict").at("ratio") == 2.5);
  CHECK(j.at("verdict").at("reasons")[0] == "RatioOutOfFence");
  CHECK(j.at("id") == "v1");
}

TEST_CASE("whitespace token counting") {
  CHECK(corpus::whitespace_token_count("") == 0);
  CHECK(corpus::whitespace_token_count("   ") == 0);
  CHECK(corpus::whitespace_token_count("one") == 1);
  CHECK(corpus::whitespace_token_count(" one  two\tthree\nfour ") == 4);
  CHECK(corpus::whitespace_token_count("a b") == 2);
}
