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

// Self-contained string-based MT metrics — corpus BLEU, chrF++, TER — plus
// multi-system comparison reports.  Tokenization is whitespace splitting;
// apply the normalizer first for consistent scores.

#ifndef CORPUSQC_METRICS_HPP_
#define CORPUSQC_METRICS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corpusqc/errors.hpp"

namespace corpusqc::metrics {

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t hyps, std::size_t refs)
      : Error("hypothesis/reference count mismatch: " + std::to_string(hyps) +
              " vs " + std::to_string(refs)) {}
};

class EmptyReference : public Error {
 public:
  EmptyReference() : Error("reference segment has no tokens") {}
};

class UnknownBaseline : public Error {
 public:
  explicit UnknownBaseline(const std::string& name)
      : Error("baseline system not among the reports: " + name) {}
};

using Tokens = std::vector<std::string>;

std::vector<std::string> tokenize_whitespace(const std::string& line);

struct BleuConfig {
  int max_order = 4;
  // When set, orders whose clipped match count is zero use `floor` instead,
  // avoiding a hard zero score.  Off by default.
  bool floor_smoothing = false;
  double floor = 0.1;
};

// Corpus-level BLEU on [0,100]: clipped n-gram counts pooled over the corpus,
// uniform weights over orders 1..max_order, brevity penalty exp(1 - r/c) when
// the hypothesis is shorter than the reference.  Orders for which the pooled
// hypothesis has no n-grams at all (every segment shorter than n) are skipped;
// a zero match count at a populated order yields 0 unless smoothing is on.
double bleu_corpus(std::span<const Tokens> hyps, std::span<const Tokens> refs,
                   const BleuConfig& config = {});

struct ChrfConfig {
  int char_max_order = 6;
  int word_max_order = 2;  // 0 turns the word component off (plain chrF)
  double beta = 2.0;       // recall weighted beta^2 times precision
};

// chrF++ on [0,100]: per-order F-scores from corpus-pooled counts, averaged
// over character orders 1..char_max_order (whitespace removed from the
// character stream) and word orders 1..word_max_order.  Orders with no
// n-grams on either side are skipped.
double chrf_pp(std::span<const std::string> hyps,
               std::span<const std::string> refs,
               const ChrfConfig& config = {});

struct TerConfig {
  bool allow_shifts = true;
  int max_shift_block = 10;
};

struct TerStats {
  std::size_t edits = 0;   // shifts + remaining edit distance
  std::size_t shifts = 0;
  std::size_t ref_length = 0;
};

// Word-level Levenshtein distance, unit costs.
std::size_t edit_distance(const Tokens& a, const Tokens& b);

// Greedy shift search: repeatedly apply the single block shift (cost 1, block
// must occur contiguously in the reference, length <= max_shift_block) that
// most reduces edit distance, requiring a strict reduction; ties prefer the
// longest block, then the leftmost origin, then the leftmost destination.
// Remaining edit distance is added afterwards.
TerStats ter_stats(const Tokens& hyp, const Tokens& ref,
                   const TerConfig& config = {});

// edits / |ref| x 100 for one segment.
double ter(const Tokens& hyp, const Tokens& ref, const TerConfig& config = {});

// total edits / total reference length x 100.
double ter_corpus(std::span<const Tokens> hyps, std::span<const Tokens> refs,
                  const TerConfig& config = {});

struct MetricConfig {
  BleuConfig bleu;
  ChrfConfig chrf;
  TerConfig ter;
};

struct LanguageScores {
  double bleu = 0.0;
  double chrf_pp = 0.0;
  double ter = 0.0;
};

// Scores one language's aligned segment lists with all three metrics.
LanguageScores score_segments(std::span<const std::string> hyp_lines,
                              std::span<const std::string> ref_lines,
                              const MetricConfig& config = {});

struct EvalReport {
  std::string system;
  std::map<std::string, LanguageScores> per_language;
  MetricConfig config;
};

nlohmann::ordered_json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

struct Comparison {
  std::string baseline;
  std::vector<std::string> systems;    // report order, baseline included
  std::vector<std::string> languages;  // union over systems, sorted
  // languages present in every system; only these enter the averages
  std::vector<std::string> common_languages;
  // system -> language -> scores; absent key means the system does not
  // support that language (rendered as a dash)
  std::map<std::string, std::map<std::string, LanguageScores>> scores;
  std::map<std::string, LanguageScores> averages;  // over common_languages
};

Comparison build_comparison(std::span<const EvalReport> reports,
                            const std::string& baseline);

nlohmann::ordered_json comparison_to_json(const Comparison& comparison);
// Plain-text table: one row per language plus an Average row; per system a
// BLEU/chrF++/TER column group, and delta-vs-baseline columns for the others.
std::string comparison_table(const Comparison& comparison);

}  // namespace corpusqc::metrics

#endif  // CORPUSQC_METRICS_HPP_
