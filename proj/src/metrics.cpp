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

#include "corpusqc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "corpusqc/unicode.hpp"

namespace corpusqc::metrics {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join_tokens(const Tokens& tokens, std::size_t begin,
                        std::size_t len) {
  std::string key;
  for (std::size_t i = begin; i < begin + len; ++i) {
    if (i > begin) key.push_back('\x1f');
    key.append(tokens[i]);
  }
  return key;
}

void count_word_ngrams(const Tokens& tokens, std::size_t n,
                       std::unordered_map<std::string, std::size_t>& counts) {
  if (tokens.size() < n) return;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[join_tokens(tokens, i, n)];
  }
}

void count_char_ngrams(const std::u32string& chars, std::size_t n,
                       std::unordered_map<std::u32string, std::size_t>& counts) {
  if (chars.size() < n) return;
  for (std::size_t i = 0; i + n <= chars.size(); ++i) {
    ++counts[chars.substr(i, n)];
  }
}

struct OrderStats {
  double matches = 0.0;
  double hyp_total = 0.0;
  double ref_total = 0.0;
};

template <typename Key>
void accumulate(const std::unordered_map<Key, std::size_t>& hyp_counts,
                const std::unordered_map<Key, std::size_t>& ref_counts,
                OrderStats& stats) {
  for (const auto& [gram, count] : hyp_counts) {
    stats.hyp_total += static_cast<double>(count);
    const auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) {
      stats.matches += static_cast<double>(std::min(count, it->second));
    }
  }
  for (const auto& [gram, count] : ref_counts) {
    stats.ref_total += static_cast<double>(count);
  }
}

// Character stream for chrF: Unicode scalars with whitespace removed.
std::u32string char_stream(const std::string& line) {
  std::u32string decoded = uni::decode_utf8_lossy(line);
  std::u32string out;
  out.reserve(decoded.size());
  for (const char32_t c : decoded) {
    if (!uni::is_space_like(c) && c != U'\n' && c != U'\r') out.push_back(c);
  }
  return out;
}

double f_score(const OrderStats& stats, double beta) {
  const double precision =
      stats.hyp_total > 0.0 ? stats.matches / stats.hyp_total : 0.0;
  const double recall =
      stats.ref_total > 0.0 ? stats.matches / stats.ref_total : 0.0;
  if (precision <= 0.0 && recall <= 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

std::string format_score(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string format_delta(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.2f", value);
  return buf;
}

ordered_json scores_to_json(const LanguageScores& scores) {
  ordered_json j;
  j["bleu"] = scores.bleu;
  j["chrf_pp"] = scores.chrf_pp;
  j["ter"] = scores.ter;
  return j;
}

}  // namespace

std::vector<std::string> tokenize_whitespace(const std::string& line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

double bleu_corpus(std::span<const Tokens> hyps, std::span<const Tokens> refs,
                   const BleuConfig& config) {
  if (hyps.size() != refs.size()) {
    throw LengthMismatch(hyps.size(), refs.size());
  }
  if (hyps.empty()) throw LengthMismatch(0, 0);

  const auto orders = static_cast<std::size_t>(config.max_order);
  std::vector<OrderStats> stats(orders);
  double hyp_len = 0.0;
  double ref_len = 0.0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    hyp_len += static_cast<double>(hyps[s].size());
    ref_len += static_cast<double>(refs[s].size());
    for (std::size_t n = 1; n <= orders; ++n) {
      std::unordered_map<std::string, std::size_t> hyp_counts;
      std::unordered_map<std::string, std::size_t> ref_counts;
      count_word_ngrams(hyps[s], n, hyp_counts);
      count_word_ngrams(refs[s], n, ref_counts);
      accumulate(hyp_counts, ref_counts, stats[n - 1]);
    }
  }

  double log_sum = 0.0;
  std::size_t used = 0;
  for (const OrderStats& order : stats) {
    if (order.hyp_total == 0.0) continue;  // no n-grams of this length at all
    double matches = order.matches;
    if (matches == 0.0) {
      if (!config.floor_smoothing) return 0.0;
      matches = config.floor;
    }
    log_sum += std::log(matches / order.hyp_total);
    ++used;
  }
  if (used == 0 || hyp_len == 0.0) return 0.0;
  const double brevity =
      hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return 100.0 * brevity * std::exp(log_sum / static_cast<double>(used));
}

double chrf_pp(std::span<const std::string> hyps,
               std::span<const std::string> refs, const ChrfConfig& config) {
  if (hyps.size() != refs.size()) {
    throw LengthMismatch(hyps.size(), refs.size());
  }
  if (hyps.empty()) throw LengthMismatch(0, 0);

  const auto char_orders = static_cast<std::size_t>(config.char_max_order);
  const auto word_orders = static_cast<std::size_t>(config.word_max_order);
  std::vector<OrderStats> char_stats(char_orders);
  std::vector<OrderStats> word_stats(word_orders);

  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const std::u32string hyp_chars = char_stream(hyps[s]);
    const std::u32string ref_chars = char_stream(refs[s]);
    for (std::size_t n = 1; n <= char_orders; ++n) {
      std::unordered_map<std::u32string, std::size_t> hyp_counts;
      std::unordered_map<std::u32string, std::size_t> ref_counts;
      count_char_ngrams(hyp_chars, n, hyp_counts);
      count_char_ngrams(ref_chars, n, ref_counts);
      accumulate(hyp_counts, ref_counts, char_stats[n - 1]);
    }
    if (word_orders > 0) {
      const Tokens hyp_tokens = tokenize_whitespace(hyps[s]);
      const Tokens ref_tokens = tokenize_whitespace(refs[s]);
      for (std::size_t n = 1; n <= word_orders; ++n) {
        std::unordered_map<std::string, std::size_t> hyp_counts;
        std::unordered_map<std::string, std::size_t> ref_counts;
        count_word_ngrams(hyp_tokens, n, hyp_counts);
        count_word_ngrams(ref_tokens, n, ref_counts);
        accumulate(hyp_counts, ref_counts, word_stats[n - 1]);
      }
    }
  }

  double f_sum = 0.0;
  std::size_t included = 0;
  for (const auto* group : {&char_stats, &word_stats}) {
    for (const OrderStats& order : *group) {
      if (order.hyp_total == 0.0 && order.ref_total == 0.0) continue;
      f_sum += f_score(order, config.beta);
      ++included;
    }
  }
  // Both sides entirely empty: trivially identical.
  if (included == 0) return 100.0;
  return 100.0 * f_sum / static_cast<double>(included);
}

std::size_t edit_distance(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

TerStats ter_stats(const Tokens& hyp, const Tokens& ref,
                   const TerConfig& config) {
  if (ref.empty()) throw EmptyReference();
  TerStats stats;
  stats.ref_length = ref.size();

  Tokens cur = hyp;
  std::size_t distance = edit_distance(cur, ref);

  if (config.allow_shifts) {
    // Only blocks that appear contiguously in the reference may be shifted.
    std::unordered_set<std::string> ref_blocks;
    const auto max_block = static_cast<std::size_t>(config.max_shift_block);
    for (std::size_t len = 1; len <= std::min(max_block, ref.size()); ++len) {
      for (std::size_t i = 0; i + len <= ref.size(); ++i) {
        ref_blocks.insert(join_tokens(ref, i, len));
      }
    }

    while (distance > 0 && !cur.empty()) {
      std::size_t best_gain = 0;
      std::size_t best_len = 0;
      std::size_t best_origin = 0;
      std::size_t best_dest = 0;
      std::size_t best_distance = 0;
      Tokens best_shifted;

      for (std::size_t len = 1; len <= std::min(max_block, cur.size());
           ++len) {
        for (std::size_t i = 0; i + len <= cur.size(); ++i) {
          if (!ref_blocks.contains(join_tokens(cur, i, len))) continue;
          Tokens removed;
          removed.reserve(cur.size() - len);
          removed.insert(removed.end(), cur.begin(), cur.begin() + i);
          removed.insert(removed.end(), cur.begin() + i + len, cur.end());
          for (std::size_t j = 0; j <= removed.size(); ++j) {
            if (j == i) continue;  // re-inserting in place is a no-op
            Tokens shifted;
            shifted.reserve(cur.size());
            shifted.insert(shifted.end(), removed.begin(), removed.begin() + j);
            shifted.insert(shifted.end(), cur.begin() + i,
                           cur.begin() + i + len);
            shifted.insert(shifted.end(), removed.begin() + j, removed.end());
            const std::size_t d = edit_distance(shifted, ref);
            if (d >= distance) continue;
            const std::size_t gain = distance - d;
            const bool better =
                gain > best_gain ||
                (gain == best_gain &&
                 (len > best_len ||
                  (len == best_len &&
                   (i < best_origin ||
                    (i == best_origin && j < best_dest)))));
            if (best_gain == 0 || better) {
              best_gain = gain;
              best_len = len;
              best_origin = i;
              best_dest = j;
              best_distance = d;
              best_shifted = std::move(shifted);
            }
          }
        }
      }
      if (best_gain == 0) break;
      cur = std::move(best_shifted);
      distance = best_distance;
      ++stats.shifts;
    }
  }

  stats.edits = stats.shifts + distance;
  return stats;
}

double ter(const Tokens& hyp, const Tokens& ref, const TerConfig& config) {
  const TerStats stats = ter_stats(hyp, ref, config);
  return 100.0 * static_cast<double>(stats.edits) /
         static_cast<double>(stats.ref_length);
}

double ter_corpus(std::span<const Tokens> hyps, std::span<const Tokens> refs,
                  const TerConfig& config) {
  if (hyps.size() != refs.size()) {
    throw LengthMismatch(hyps.size(), refs.size());
  }
  if (hyps.empty()) throw LengthMismatch(0, 0);
  std::size_t edits = 0;
  std::size_t ref_len = 0;
  for (std::size_t s = 0; s < hyps.size(); ++s) {
    const TerStats stats = ter_stats(hyps[s], refs[s], config);
    edits += stats.edits;
    ref_len += stats.ref_length;
  }
  return 100.0 * static_cast<double>(edits) / static_cast<double>(ref_len);
}

LanguageScores score_segments(std::span<const std::string> hyp_lines,
                              std::span<const std::string> ref_lines,
                              const MetricConfig& config) {
  if (hyp_lines.size() != ref_lines.size()) {
    throw LengthMismatch(hyp_lines.size(), ref_lines.size());
  }
  std::vector<Tokens> hyp_tokens;
  std::vector<Tokens> ref_tokens;
  hyp_tokens.reserve(hyp_lines.size());
  ref_tokens.reserve(ref_lines.size());
  for (const std::string& line : hyp_lines) {
    hyp_tokens.push_back(tokenize_whitespace(line));
  }
  for (const std::string& line : ref_lines) {
    ref_tokens.push_back(tokenize_whitespace(line));
  }
  LanguageScores scores;
  scores.bleu = bleu_corpus(hyp_tokens, ref_tokens, config.bleu);
  scores.chrf_pp = chrf_pp(hyp_lines, ref_lines, config.chrf);
  scores.ter = ter_corpus(hyp_tokens, ref_tokens, config.ter);
  return scores;
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  ordered_json j;
  j["system"] = report.system;
  ordered_json per_language = ordered_json::object();
  for (const auto& [language, scores] : report.per_language) {
    per_language[language] = scores_to_json(scores);
  }
  j["per_language"] = std::move(per_language);
  j["config"] = {
      {"bleu",
       {{"max_order", report.config.bleu.max_order},
        {"floor_smoothing", report.config.bleu.floor_smoothing},
        {"floor", report.config.bleu.floor}}},
      {"chrf",
       {{"char_max_order", report.config.chrf.char_max_order},
        {"word_max_order", report.config.chrf.word_max_order},
        {"beta", report.config.chrf.beta}}},
      {"ter",
       {{"allow_shifts", report.config.ter.allow_shifts},
        {"max_shift_block", report.config.ter.max_shift_block}}}};
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport report;
  report.system = j.at("system").get<std::string>();
  for (const auto& [language, scores] : j.at("per_language").items()) {
    report.per_language[language] =
        LanguageScores{scores.at("bleu").get<double>(),
                       scores.at("chrf_pp").get<double>(),
                       scores.at("ter").get<double>()};
  }
  if (j.contains("config")) {
    const auto& c = j.at("config");
    report.config.bleu.max_order = c.at("bleu").at("max_order").get<int>();
    report.config.bleu.floor_smoothing =
        c.at("bleu").at("floor_smoothing").get<bool>();
    report.config.bleu.floor = c.at("bleu").at("floor").get<double>();
    report.config.chrf.char_max_order =
        c.at("chrf").at("char_max_order").get<int>();
    report.config.chrf.word_max_order =
        c.at("chrf").at("word_max_order").get<int>();
    report.config.chrf.beta = c.at("chrf").at("beta").get<double>();
    report.config.ter.allow_shifts =
        c.at("ter").at("allow_shifts").get<bool>();
    report.config.ter.max_shift_block =
        c.at("ter").at("max_shift_block").get<int>();
  }
  return report;
}

Comparison build_comparison(std::span<const EvalReport> reports,
                            const std::string& baseline) {
  Comparison comparison;
  comparison.baseline = baseline;
  bool baseline_found = false;
  std::set<std::string> language_union;
  for (const EvalReport& report : reports) {
    comparison.systems.push_back(report.system);
    if (report.system == baseline) baseline_found = true;
    auto& target = comparison.scores[report.system];
    for (const auto& [language, scores] : report.per_language) {
      target[language] = scores;
      language_union.insert(language);
    }
  }
  if (!baseline_found) throw UnknownBaseline(baseline);
  comparison.languages.assign(language_union.begin(), language_union.end());

  for (const std::string& language : comparison.languages) {
    const bool everywhere = std::all_of(
        reports.begin(), reports.end(), [&](const EvalReport& report) {
          return report.per_language.contains(language);
        });
    if (everywhere) comparison.common_languages.push_back(language);
  }

  if (!comparison.common_languages.empty()) {
    for (const EvalReport& report : reports) {
      LanguageScores sum;
      for (const std::string& language : comparison.common_languages) {
        const LanguageScores& scores = report.per_language.at(language);
        sum.bleu += scores.bleu;
        sum.chrf_pp += scores.chrf_pp;
        sum.ter += scores.ter;
      }
      const auto n = static_cast<double>(comparison.common_languages.size());
      comparison.averages[report.system] =
          LanguageScores{sum.bleu / n, sum.chrf_pp / n, sum.ter / n};
    }
  }
  return comparison;
}

nlohmann::ordered_json comparison_to_json(const Comparison& comparison) {
  ordered_json j;
  j["baseline"] = comparison.baseline;
  j["systems"] = comparison.systems;
  j["languages"] = comparison.languages;
  j["common_languages"] = comparison.common_languages;
  ordered_json scores = ordered_json::object();
  ordered_json deltas = ordered_json::object();
  const auto& base_scores = comparison.scores.at(comparison.baseline);
  for (const std::string& system : comparison.systems) {
    const auto& per_language = comparison.scores.at(system);
    ordered_json sys_scores = ordered_json::object();
    ordered_json sys_deltas = ordered_json::object();
    for (const std::string& language : comparison.languages) {
      const auto it = per_language.find(language);
      if (it == per_language.end()) {
        sys_scores[language] = nullptr;  // unsupported
        continue;
      }
      sys_scores[language] = scores_to_json(it->second);
      const auto base_it = base_scores.find(language);
      if (system != comparison.baseline && base_it != base_scores.end()) {
        sys_deltas[language] = scores_to_json(
            LanguageScores{it->second.bleu - base_it->second.bleu,
                           it->second.chrf_pp - base_it->second.chrf_pp,
                           it->second.ter - base_it->second.ter});
      }
    }
    scores[system] = std::move(sys_scores);
    if (system != comparison.baseline) deltas[system] = std::move(sys_deltas);
  }
  j["scores"] = std::move(scores);
  j["deltas"] = std::move(deltas);
  ordered_json averages = ordered_json::object();
  for (const auto& [system, avg] : comparison.averages) {
    averages[system] = scores_to_json(avg);
  }
  j["averages"] = std::move(averages);
  return j;
}

std::string comparison_table(const Comparison& comparison) {
  std::vector<std::string> header{"Language"};
  for (const std::string& system : comparison.systems) {
    header.push_back(system + " BLEU");
    header.push_back(system + " chrF++");
    header.push_back(system + " TER");
  }

  const auto& base_scores = comparison.scores.at(comparison.baseline);
  std::vector<std::vector<std::string>> rows;
  for (const std::string& language : comparison.languages) {
    std::vector<std::string> row{language};
    const auto base_it = base_scores.find(language);
    for (const std::string& system : comparison.systems) {
      const auto& per_language = comparison.scores.at(system);
      const auto it = per_language.find(language);
      if (it == per_language.end()) {
        row.insert(row.end(), {"-", "-", "-"});
        continue;
      }
      const bool with_delta =
          system != comparison.baseline && base_it != base_scores.end();
      auto cell = [&](double value, double base_value) {
        std::string text = format_score(value);
        if (with_delta) {
          text += " (" + format_delta(value - base_value) + ")";
        }
        return text;
      };
      const LanguageScores base_value =
          base_it != base_scores.end() ? base_it->second : LanguageScores{};
      row.push_back(cell(it->second.bleu, base_value.bleu));
      row.push_back(cell(it->second.chrf_pp, base_value.chrf_pp));
      row.push_back(cell(it->second.ter, base_value.ter));
    }
    rows.push_back(std::move(row));
  }

  if (!comparison.averages.empty()) {
    std::vector<std::string> row{"Average"};
    const LanguageScores& base_avg =
        comparison.averages.at(comparison.baseline);
    for (const std::string& system : comparison.systems) {
      const LanguageScores& avg = comparison.averages.at(system);
      auto cell = [&](double value, double base_value) {
        std::string text = format_score(value);
        if (system != comparison.baseline) {
          text += " (" + format_delta(value - base_value) + ")";
        }
        return text;
      };
      row.push_back(cell(avg.bleu, base_avg.bleu));
      row.push_back(cell(avg.chrf_pp, base_avg.chrf_pp));
      row.push_back(cell(avg.ter, base_avg.ter));
    }
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(header.size());
  for (std::size_t col = 0; col < header.size(); ++col) {
    widths[col] = header[col].size();
    for (const auto& row : rows) {
      widths[col] = std::max(widths[col], row[col].size());
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t col = 0; col < row.size(); ++col) {
      if (col) out << "  ";
      out << row[col] << std::string(widths[col] - row[col].size(), ' ');
    }
    out << "\n";
  };
  emit(header);
  std::size_t rule = 0;
  for (std::size_t col = 0; col < widths.size(); ++col) {
    rule += widths[col] + (col ? 2 : 0);
  }
  out << std::string(rule, '-') << "\n";
  for (const auto& row : rows) emit(row);
  return out.str();
}

}  // namespace corpusqc::metrics
