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

// Multi-source corpus ingestion, exact-duplicate removal, resource-tier
// classification, manifest statistics, and JSONL dataset export.

#ifndef CORPUSQC_CORPUS_HPP_
#define CORPUSQC_CORPUS_HPP_

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corpusqc/errors.hpp"
#include "corpusqc/statval.hpp"

namespace corpusqc::corpus {

class MissingFile : public IoError {
 public:
  explicit MissingFile(const std::string& path)
      : IoError("input file not found: " + path) {}
};

class DuplicateLanguage : public Error {
 public:
  explicit DuplicateLanguage(const std::string& language)
      : Error("duplicate manifest language: " + language) {}
};

class NegativeCount : public Error {
 public:
  explicit NegativeCount(double value)
      : Error("resource count must be non-negative, got " +
              std::to_string(value)) {}
};

enum class SourceFormat { kTsv2, kJsonl, kMono };

const char* source_format_name(SourceFormat format);
// Accepts "tsv2", "jsonl", "mono"; throws Error otherwise.
SourceFormat parse_source_format(const std::string& text);

struct SourceDescriptor {
  std::string path;
  SourceFormat format = SourceFormat::kTsv2;
  std::string src_lang;
  std::string tgt_lang;  // empty for mono sources
};

// One export/ingest row.  `verdict` is attached after validation; ingest
// leaves it empty.
struct DatasetRecord {
  std::string id;
  std::string src_lang;
  std::string tgt_lang;
  std::string src_text;
  std::string tgt_text;
  std::string origin;
  std::optional<statval::ValidationVerdict> verdict;

  statval::SentencePair to_pair() const {
    return {id, src_lang, tgt_lang, src_text, tgt_text, origin};
  }
};

struct MalformedLine {
  std::string origin;
  std::size_t line_no = 0;
  std::string message;
};

// Streams records from one source file.  Malformed lines are collected, not
// fatal; a missing file is.  Formats:
//   tsv2  — exactly two tab-separated columns, src\ttgt
//   jsonl — one JSON object per line with src_text (and usually tgt_text)
//   mono  — one source-side segment per line, blank lines skipped
class SourceReader {
 public:
  explicit SourceReader(SourceDescriptor descriptor);

  // Fills `out` and returns true, or returns false at end of input.
  bool next(DatasetRecord& out);

  const std::vector<MalformedLine>& malformed() const { return malformed_; }
  const SourceDescriptor& descriptor() const { return descriptor_; }
  std::size_t lines_read() const { return line_no_; }

 private:
  bool parse_line(const std::string& line, DatasetRecord& out);

  SourceDescriptor descriptor_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::vector<MalformedLine> malformed_;
};

struct OriginCounts {
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

struct DedupReport {
  std::map<std::string, OriginCounts> per_origin;
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

// Exact-duplicate filter keyed on (src_lang, tgt_lang, src_text, tgt_text).
// Safe to call from multiple ingestion threads.
class Deduper {
 public:
  // Returns true if the record is the first of its kind and should be kept.
  bool keep(const statval::SentencePair& pair);
  DedupReport report() const;

 private:
  mutable std::mutex mutex_;
  std::unordered_set<std::string> seen_;
  DedupReport report_;
};

enum class AudioTier { kHigh, kEstablished, kModerate, kLow };

const char* audio_tier_name(AudioTier tier);

// Text tiers by monolingual token count (millions): 1 >= 2000, 2 in
// [900, 2000), 3 in [250, 900), 4 below 250.  All boundaries closed at the
// lower edge.
int classify_text_tier(double tokens_millions);

// Audio tiers by recorded hours: High >= 1000, Established [500, 1000),
// Moderate [100, 500), Low < 100.
AudioTier classify_audio_tier(double hours);

struct InventoryRow {
  std::string language;
  double tokens_millions = 0.0;
  std::optional<double> audio_hours;  // absent means no audio at all, not 0h
};

struct ManifestEntry {
  std::string language;
  double tokens_millions = 0.0;
  std::optional<double> audio_hours;
  int text_tier = 4;
  std::optional<AudioTier> audio_tier;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;  // input order preserved
  double total_tokens_millions = 0.0;
  double total_audio_hours = 0.0;
  std::size_t language_count = 0;
  std::size_t languages_without_audio = 0;
  // max token count over min positive token count; 0 when undefined.
  double disparity_ratio = 0.0;
};

CorpusManifest build_manifest(std::span<const InventoryRow> rows);

// Reads "language<TAB>tokens_millions<TAB>audio_hours" rows; '-' in the last
// column marks a language with no audio.  '#' lines are comments.
std::vector<InventoryRow> load_inventory(const std::filesystem::path& path);

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest);
std::string manifest_table(const CorpusManifest& manifest);
// Horizontal bar charts, one bar per language.
std::string manifest_svg_tokens(const CorpusManifest& manifest);
std::string manifest_svg_hours(const CorpusManifest& manifest);

// Writes one JSON object per record in a stable field order; returns the row
// count.  The output re-ingests bit-identically via format jsonl.
std::size_t export_records(std::span<const DatasetRecord> records,
                           std::ostream& out);
std::size_t export_records(std::span<const DatasetRecord> records,
                           const std::filesystem::path& path);

std::size_t whitespace_token_count(std::string_view text);

}  // namespace corpusqc::corpus

#endif  // CORPUSQC_CORPUS_HPP_
