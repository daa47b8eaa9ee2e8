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

#include "corpusqc/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace corpusqc::corpus {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

double parse_real(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw Error("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw Error(where + ": expected a number, got '" + text + "'");
  }
}

void append_svg_bars(std::ostringstream& out,
                     const std::vector<std::pair<std::string, double>>& rows,
                     const std::string& title) {
  constexpr int kLabelWidth = 140;
  constexpr int kBarArea = 540;
  constexpr int kRowPitch = 18;
  constexpr int kTop = 28;
  double max_value = 0.0;
  for (const auto& [label, value] : rows) max_value = std::max(max_value, value);
  if (max_value <= 0.0) max_value = 1.0;
  const int height = kTop + kRowPitch * static_cast<int>(rows.size()) + 8;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\""
      << height << "\" font-family=\"monospace\" font-size=\"12\">\n";
  out << "<text x=\"8\" y=\"18\" font-weight=\"bold\">" << title
      << "</text>\n";
  int y = kTop;
  for (const auto& [label, value] : rows) {
    const int bar =
        static_cast<int>(value / max_value * kBarArea + 0.5);
    out << "<text x=\"8\" y=\"" << y + 11 << "\">" << label << "</text>\n";
    out << "<rect x=\"" << kLabelWidth << "\" y=\"" << y << "\" width=\""
        << std::max(bar, 1) << "\" height=\"13\" fill=\"#4878a8\"/>\n";
    out << "<text x=\"" << kLabelWidth + std::max(bar, 1) + 6 << "\" y=\""
        << y + 11 << "\">" << format_real(value) << "</text>\n";
    y += kRowPitch;
  }
  out << "</svg>\n";
}

}  // namespace

const char* source_format_name(SourceFormat format) {
  switch (format) {
    case SourceFormat::kTsv2: return "tsv2";
    case SourceFormat::kJsonl: return "jsonl";
    case SourceFormat::kMono: return "mono";
  }
  return "?";
}

SourceFormat parse_source_format(const std::string& text) {
  if (text == "tsv2") return SourceFormat::kTsv2;
  if (text == "jsonl") return SourceFormat::kJsonl;
  if (text == "mono") return SourceFormat::kMono;
  throw Error("unknown source format '" + text +
              "' (expected tsv2, jsonl, or mono)");
}

SourceReader::SourceReader(SourceDescriptor descriptor)
    : descriptor_(std::move(descriptor)) {
  if (!std::filesystem::exists(descriptor_.path)) {
    throw MissingFile(descriptor_.path);
  }
  in_.open(descriptor_.path, std::ios::binary);
  if (!in_) throw IoError("cannot open " + descriptor_.path);
}

bool SourceReader::parse_line(const std::string& line, DatasetRecord& out) {
  const std::string fallback_id =
      descriptor_.path + ":" + std::to_string(line_no_);
  switch (descriptor_.format) {
    case SourceFormat::kTsv2: {
      const auto fields = split_tabs(line);
      if (fields.size() != 2) {
        malformed_.push_back({descriptor_.path, line_no_,
                              "expected 2 tab-separated columns, found " +
                                  std::to_string(fields.size())});
        return false;
      }
      out = DatasetRecord{fallback_id,  descriptor_.src_lang,
                          descriptor_.tgt_lang, fields[0],
                          fields[1],    descriptor_.path,
                          std::nullopt};
      return true;
    }
    case SourceFormat::kJsonl: {
      if (line.empty()) return false;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error& err) {
        malformed_.push_back({descriptor_.path, line_no_, err.what()});
        return false;
      }
      if (!j.is_object() || !j.contains("src_text")) {
        malformed_.push_back(
            {descriptor_.path, line_no_, "missing required field src_text"});
        return false;
      }
      try {
        out = DatasetRecord{j.value("id", fallback_id),
                            j.value("src_lang", descriptor_.src_lang),
                            j.value("tgt_lang", descriptor_.tgt_lang),
                            j.at("src_text").get<std::string>(),
                            j.value("tgt_text", ""),
                            j.value("origin", descriptor_.path),
                            std::nullopt};
      } catch (const json::exception& err) {
        malformed_.push_back({descriptor_.path, line_no_, err.what()});
        return false;
      }
      return true;
    }
    case SourceFormat::kMono: {
      if (line.empty()) return false;
      out = DatasetRecord{fallback_id, descriptor_.src_lang, "",
                          line,        "",                   descriptor_.path,
                          std::nullopt};
      return true;
    }
  }
  return false;
}

bool SourceReader::next(DatasetRecord& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (parse_line(strip_cr(std::move(line)), out)) return true;
  }
  return false;
}

bool Deduper::keep(const statval::SentencePair& pair) {
  std::string key;
  key.reserve(pair.src_text.size() + pair.tgt_text.size() + 16);
  key.append(pair.src_lang).push_back('\x1f');
  key.append(pair.tgt_lang).push_back('\x1f');
  key.append(pair.src_text).push_back('\x1f');
  key.append(pair.tgt_text);

  const std::lock_guard<std::mutex> lock(mutex_);
  const bool fresh = seen_.insert(std::move(key)).second;
  OriginCounts& counts = report_.per_origin[pair.origin];
  if (fresh) {
    ++counts.kept;
    ++report_.kept;
  } else {
    ++counts.dropped;
    ++report_.dropped;
  }
  return fresh;
}

DedupReport Deduper::report() const {
  const std::lock_guard<std::mutex> lock(mutex_);
  return report_;
}

const char* audio_tier_name(AudioTier tier) {
  switch (tier) {
    case AudioTier::kHigh: return "High";
    case AudioTier::kEstablished: return "Established";
    case AudioTier::kModerate: return "Moderate";
    case AudioTier::kLow: return "Low";
  }
  return "?";
}

int classify_text_tier(double tokens_millions) {
  if (tokens_millions < 0.0) throw NegativeCount(tokens_millions);
  if (tokens_millions >= 2000.0) return 1;
  if (tokens_millions >= 900.0) return 2;
  if (tokens_millions >= 250.0) return 3;
  return 4;
}

AudioTier classify_audio_tier(double hours) {
  if (hours < 0.0) throw NegativeCount(hours);
  if (hours >= 1000.0) return AudioTier::kHigh;
  if (hours >= 500.0) return AudioTier::kEstablished;
  if (hours >= 100.0) return AudioTier::kModerate;
  return AudioTier::kLow;
}

CorpusManifest build_manifest(std::span<const InventoryRow> rows) {
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  double max_tokens = 0.0;
  double min_positive_tokens = 0.0;
  for (const InventoryRow& row : rows) {
    if (!seen.insert(row.language).second) {
      throw DuplicateLanguage(row.language);
    }
    ManifestEntry entry;
    entry.language = row.language;
    entry.tokens_millions = row.tokens_millions;
    entry.audio_hours = row.audio_hours;
    entry.text_tier = classify_text_tier(row.tokens_millions);
    if (row.audio_hours) {
      entry.audio_tier = classify_audio_tier(*row.audio_hours);
      manifest.total_audio_hours += *row.audio_hours;
    } else {
      ++manifest.languages_without_audio;
    }
    manifest.total_tokens_millions += row.tokens_millions;
    max_tokens = std::max(max_tokens, row.tokens_millions);
    if (row.tokens_millions > 0.0 &&
        (min_positive_tokens == 0.0 ||
         row.tokens_millions < min_positive_tokens)) {
      min_positive_tokens = row.tokens_millions;
    }
    manifest.entries.push_back(std::move(entry));
  }
  manifest.language_count = manifest.entries.size();
  if (min_positive_tokens > 0.0) {
    manifest.disparity_ratio = max_tokens / min_positive_tokens;
  }
  return manifest;
}

std::vector<InventoryRow> load_inventory(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingFile(path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<InventoryRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw Error(path.string() + " line " + std::to_string(line_no) +
                  ": expected 3 tab-separated columns");
    }
    const std::string where = path.string() + " line " + std::to_string(line_no);
    InventoryRow row;
    row.language = fields[0];
    row.tokens_millions = parse_real(fields[1], where);
    if (fields[2] != "-") {
      row.audio_hours = parse_real(fields[2], where);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest) {
  ordered_json j;
  auto entries = ordered_json::array();
  for (const ManifestEntry& entry : manifest.entries) {
    ordered_json e;
    e["language"] = entry.language;
    e["tokens_millions"] = entry.tokens_millions;
    if (entry.audio_hours) {
      e["audio_hours"] = *entry.audio_hours;
    } else {
      e["audio_hours"] = nullptr;
    }
    e["text_tier"] = entry.text_tier;
    if (entry.audio_tier) {
      e["audio_tier"] = audio_tier_name(*entry.audio_tier);
    } else {
      e["audio_tier"] = nullptr;
    }
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  j["totals"] = {{"tokens_millions", manifest.total_tokens_millions},
                 {"audio_hours", manifest.total_audio_hours},
                 {"language_count", manifest.language_count}};
  j["languages_without_audio"] = manifest.languages_without_audio;
  j["disparity_ratio"] = manifest.disparity_ratio;
  return j;
}

std::string manifest_table(const CorpusManifest& manifest) {
  constexpr const char* kHeader[] = {"Language", "Tokens (M)", "Text tier",
                                     "Audio (h)", "Audio tier"};
  std::vector<std::array<std::string, 5>> rows;
  for (const ManifestEntry& entry : manifest.entries) {
    rows.push_back({entry.language, format_real(entry.tokens_millions),
                    std::to_string(entry.text_tier),
                    entry.audio_hours ? format_real(*entry.audio_hours) : "-",
                    entry.audio_tier ? audio_tier_name(*entry.audio_tier)
                                     : "-"});
  }
  rows.push_back({"TOTAL", format_real(manifest.total_tokens_millions), "",
                  format_real(manifest.total_audio_hours), ""});

  std::array<std::size_t, 5> widths{};
  for (std::size_t col = 0; col < 5; ++col) {
    widths[col] = std::string(kHeader[col]).size();
    for (const auto& row : rows) {
      widths[col] = std::max(widths[col], row[col].size());
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::array<std::string, 5>& row) {
    for (std::size_t col = 0; col < 5; ++col) {
      if (col) out << "  ";
      out << row[col]
          << std::string(widths[col] - row[col].size(), ' ');
    }
    out << "\n";
  };
  emit({kHeader[0], kHeader[1], kHeader[2], kHeader[3], kHeader[4]});
  std::size_t rule = 0;
  for (std::size_t col = 0; col < 5; ++col) rule += widths[col] + (col ? 2 : 0);
  out << std::string(rule, '-') << "\n";
  for (const auto& row : rows) emit(row);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", manifest.disparity_ratio);
  out << "languages without audio: " << manifest.languages_without_audio
      << "\n";
  out << "disparity ratio (max/min tokens): " << buf << "\n";
  return out.str();
}

std::string manifest_svg_tokens(const CorpusManifest& manifest) {
  std::vector<std::pair<std::string, double>> rows;
  for (const ManifestEntry& entry : manifest.entries) {
    rows.emplace_back(entry.language, entry.tokens_millions);
  }
  std::ostringstream out;
  append_svg_bars(out, rows, "Monolingual tokens (millions)");
  return out.str();
}

std::string manifest_svg_hours(const CorpusManifest& manifest) {
  std::vector<std::pair<std::string, double>> rows;
  for (const ManifestEntry& entry : manifest.entries) {
    if (entry.audio_hours) rows.emplace_back(entry.language, *entry.audio_hours);
  }
  std::ostringstream out;
  append_svg_bars(out, rows, "Audio (hours)");
  return out.str();
}

std::size_t export_records(std::span<const DatasetRecord> records,
                           std::ostream& out) {
  std::size_t count = 0;
  for (const DatasetRecord& record : records) {
    ordered_json j;
    j["id"] = record.id;
    j["src_lang"] = record.src_lang;
    j["tgt_lang"] = record.tgt_lang;
    j["src_text"] = record.src_text;
    j["tgt_text"] = record.tgt_text;
    j["origin"] = record.origin;
    if (record.verdict) {
      j["verdict"] = statval::verdict_to_json(*record.verdict);
    }
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace)
        << "\n";
    ++count;
  }
  if (!out) throw IoError("write failure during record export");
  return count;
}

std::size_t export_records(std::span<const DatasetRecord> records,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::size_t count = export_records(records, out);
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
  return count;
}

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (const char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

}  // namespace corpusqc::corpus
