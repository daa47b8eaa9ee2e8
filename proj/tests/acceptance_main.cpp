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

// End-to-end release gate.  Each check prints exactly one PASS/FAIL line;
// the process exits nonzero when any check fails.  Checks cover the shipped
// language inventory, the review state machine, the metric suite, the
// statistical filter, KDE calibration, normalization idempotence, pipeline
// determinism across worker counts, and single-core throughput.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "corpusqc/corpus.hpp"
#include "corpusqc/metrics.hpp"
#include "corpusqc/normalize.hpp"
#include "corpusqc/pipeline.hpp"
#include "corpusqc/review.hpp"
#include "corpusqc/statval.hpp"
#include "corpusqc/unicode.hpp"
#include "test_support.hpp"

namespace corpus = corpusqc::corpus;
namespace metrics = corpusqc::metrics;
namespace normalize = corpusqc::normalize;
namespace review = corpusqc::review;
namespace statval = corpusqc::statval;
namespace uni = corpusqc::uni;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since)
      .count();
}

bool within_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

std::string fmt(const char* pattern, ...) {
  char buffer[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buffer, sizeof(buffer), pattern, args);
  va_end(args);
  return std::string(buffer);
}

const corpus::CorpusManifest& shipped_manifest() {
  static const corpus::CorpusManifest manifest = [] {
    const auto rows = corpus::load_inventory(
        fs::path(CORPUSQC_DATA_DIR) / "language_inventory.tsv");
    return corpus::build_manifest(rows);
  }();
  return manifest;
}

// ---- 1. inventory totals -------------------------------------------------

Outcome check_manifest_totals() {
  const auto start = Clock::now();
  const auto rows = corpus::load_inventory(
      fs::path(CORPUSQC_DATA_DIR) / "language_inventory.tsv");
  const auto manifest = corpus::build_manifest(rows);
  const double ms = elapsed_ms(start);

  const double tokens = manifest.total_tokens_millions;
  const double audio = manifest.total_audio_hours;
  const bool tokens_ok = within_rel(tokens, 19012.02, 5e-4);
  const bool audio_ok = within_rel(audio, 12628.0, 5e-4);
  const bool fast_ok = ms < 1000.0;
  Outcome out;
  out.ok = tokens_ok && audio_ok && fast_ok;
  out.detail = fmt(
      "tokens %.2fM vs 19012.02M (0.05%% tolerance %s), audio %.2fh vs 12628h "
      "(%s), built in %.1fms (<1s %s)",
      tokens, tokens_ok ? "ok" : "MISS", audio, audio_ok ? "ok" : "MISS", ms,
      fast_ok ? "ok" : "MISS");
  return out;
}

// ---- 2. tier assignments -------------------------------------------------

Outcome check_tier_assignments() {
  const auto& manifest = shipped_manifest();
  std::map<std::string, const corpus::ManifestEntry*> by_language;
  for (const auto& entry : manifest.entries) {
    by_language[entry.language] = &entry;
  }

  const std::vector<std::pair<std::string, int>> text_expect = {
      {"Amharic", 1},  {"Arabic", 1},  {"Yoruba", 1}, {"Afrikaans", 1},
      {"Hausa", 2},    {"Tigrinya", 2}, {"Malagasy", 3}, {"Somali", 3},
      {"Swahili", 3},  {"Xhosa", 3},   {"Bambara", 4}, {"Luganda", 4}};
  const std::vector<std::pair<std::string, corpus::AudioTier>> audio_expect = {
      {"Kinyarwanda", corpus::AudioTier::kHigh},
      {"Luganda", corpus::AudioTier::kHigh},
      {"Swahili", corpus::AudioTier::kHigh},
      {"Arabic", corpus::AudioTier::kHigh},
      {"Malagasy", corpus::AudioTier::kModerate},
      {"Twi", corpus::AudioTier::kModerate},
      {"Bemba", corpus::AudioTier::kModerate},
      {"Ewe", corpus::AudioTier::kModerate}};

  std::size_t checked = 0;
  std::vector<std::string> mismatches;
  for (const auto& [language, tier] : text_expect) {
    ++checked;
    const auto it = by_language.find(language);
    if (it == by_language.end() || it->second->text_tier != tier) {
      mismatches.push_back(language + " (text)");
    }
  }
  for (const auto& [language, tier] : audio_expect) {
    ++checked;
    const auto it = by_language.find(language);
    if (it == by_language.end() || !it->second->audio_tier.has_value() ||
        *it->second->audio_tier != tier) {
      mismatches.push_back(language + " (audio)");
    }
  }

  Outcome out;
  out.ok = mismatches.empty();
  std::ostringstream detail;
  detail << (checked - mismatches.size()) << "/" << checked
         << " named tier assignments reproduced";
  if (!mismatches.empty()) {
    detail << "; mismatched:";
    for (const auto& name : mismatches) detail << " " << name;
  }
  out.detail = detail.str();
  return out;
}

// ---- 3. disparity ratio --------------------------------------------------

Outcome check_disparity() {
  const double disparity = shipped_manifest().disparity_ratio;
  const bool exact_ok = std::abs(disparity - 147247.5) < 0.1;
  const bool headline_ok = within_rel(disparity, 147000.0, 2e-3);
  Outcome out;
  out.ok = exact_ok && headline_ok;
  out.detail = fmt(
      "max/min token disparity %.1f (expected 147247.5 %s; within 0.2%% of "
      "147000 %s)",
      disparity, exact_ok ? "ok" : "MISS", headline_ok ? "ok" : "MISS");
  return out;
}

// ---- 4. review status grid -----------------------------------------------

Outcome check_review_grid() {
  const review::Thresholds thresholds;
  const auto oracle = [](std::uint32_t u, std::uint32_t d) {
    if (d >= 3) return review::Status::kRejected;
    if (u >= 6) return review::Status::kVerified;
    return review::Status::kPending;
  };
  const auto rank = [](review::Status s) {
    switch (s) {
      case review::Status::kRejected: return 0;
      case review::Status::kPending: return 1;
      case review::Status::kVerified: return 2;
    }
    return -1;
  };

  std::size_t matches = 0;
  std::size_t cells = 0;
  bool monotone = true;
  for (std::uint32_t u = 0; u <= 20; ++u) {
    for (std::uint32_t d = 0; d <= 10; ++d) {
      ++cells;
      const auto got = review::status_of(u, d, thresholds);
      if (got == oracle(u, d)) ++matches;
      // Extra upvotes never demote; extra downvotes never promote.
      if (u < 20 &&
          rank(review::status_of(u + 1, d, thresholds)) < rank(got)) {
        monotone = false;
      }
      if (d < 10 &&
          rank(review::status_of(u, d + 1, thresholds)) > rank(got)) {
        monotone = false;
      }
    }
  }

  Outcome out;
  out.ok = matches == cells && monotone;
  out.detail = fmt("%zu/%zu grid cells match the oracle; monotonicity %s",
                   matches, cells, monotone ? "holds" : "VIOLATED");
  return out;
}

// ---- 5. metric hand scores -----------------------------------------------

metrics::Tokens toks(const std::string& line) {
  return metrics::tokenize_whitespace(line);
}

Outcome check_metric_scores() {
  std::vector<std::string> parts;

  // Identity must be exact, not approximate.
  const std::vector<std::string> lines = {"the cat sat on the mat",
                                          "omi ni iye", "good morning"};
  std::vector<metrics::Tokens> tokens;
  for (const auto& line : lines) tokens.push_back(toks(line));
  const bool identity_ok = metrics::bleu_corpus(tokens, tokens) == 100.0 &&
                           metrics::chrf_pp(lines, lines) == 100.0 &&
                           metrics::ter_corpus(tokens, tokens) == 0.0;
  parts.push_back(fmt("identity (100,100,0) %s", identity_ok ? "ok" : "MISS"));

  const double bleu = metrics::bleu_corpus(
      std::vector<metrics::Tokens>{toks("the cat sat on mat")},
      std::vector<metrics::Tokens>{toks("the cat sat on the mat")});
  const bool bleu_ok = std::abs(bleu - 57.89) <= 0.01;
  parts.push_back(fmt("BLEU %.2f~57.89 %s", bleu, bleu_ok ? "ok" : "MISS"));

  metrics::ChrfConfig chrf_config;
  chrf_config.char_max_order = 2;
  chrf_config.word_max_order = 0;
  const double chrf =
      metrics::chrf_pp(std::vector<std::string>{"abc"},
                       std::vector<std::string>{"abd"}, chrf_config);
  const bool chrf_ok = std::abs(chrf - 58.33) <= 0.01;
  parts.push_back(fmt("chrF %.2f~58.33 %s", chrf, chrf_ok ? "ok" : "MISS"));

  const double ter_shift = metrics::ter(toks("b c d a"), toks("a b c d"));
  const double ter_sub = metrics::ter(toks("a b c d e"), toks("a b x d e"));
  const bool ter_ok = std::abs(ter_shift - 25.0) <= 0.01 &&
                      std::abs(ter_sub - 20.0) <= 0.01;
  parts.push_back(fmt("TER %.2f~25 / %.2f~20 %s", ter_shift, ter_sub,
                      ter_ok ? "ok" : "MISS"));

  // Allowing shifts can only lower the edit count.
  std::mt19937 rng(5150);
  metrics::TerConfig no_shifts;
  no_shifts.allow_shifts = false;
  std::size_t shift_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const metrics::Tokens hyp = testsup::random_token_sentence(rng, 10);
    metrics::Tokens ref = testsup::random_token_sentence(rng, 10);
    if (trial % 2 == 1 && hyp.size() >= 2) {
      ref = hyp;  // rotated copies make shifting worthwhile
      std::rotate(ref.begin(), ref.begin() + 1, ref.end());
    }
    if (metrics::ter_stats(hyp, ref).edits >
        metrics::ter_stats(hyp, ref, no_shifts).edits) {
      ++shift_violations;
    }
  }
  parts.push_back(fmt("shift<=plain on 1000 pairs (%zu violations)",
                      shift_violations));

  // Pooled counts make corpus BLEU order-independent; require exact equality.
  std::vector<metrics::Tokens> hyps, refs;
  for (int s = 0; s < 50; ++s) {
    hyps.push_back(testsup::random_token_sentence(rng));
    refs.push_back(testsup::random_token_sentence(rng));
  }
  const double base = metrics::bleu_corpus(hyps, refs);
  std::vector<std::size_t> order(hyps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t shuffle_violations = 0;
  for (int shuffle = 0; shuffle < 100; ++shuffle) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<metrics::Tokens> h2, r2;
    for (std::size_t i : order) {
      h2.push_back(hyps[i]);
      r2.push_back(refs[i]);
    }
    if (metrics::bleu_corpus(h2, r2) != base) ++shuffle_violations;
  }
  parts.push_back(fmt("BLEU invariant over 100 shuffles (%zu violations)",
                      shuffle_violations));

  Outcome out;
  out.ok = identity_ok && bleu_ok && chrf_ok && ter_ok &&
           shift_violations == 0 && shuffle_violations == 0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) detail << "; ";
    detail << parts[i];
  }
  out.detail = detail.str();
  return out;
}

// ---- 6. outlier filter efficacy ------------------------------------------

Outcome check_filter_efficacy() {
  const auto start = Clock::now();
  testsup::GaussianSampler sampler(20260823);

  // 10,000 in-distribution pairs and 500 planted outliers, interleaved the
  // way a crawler would surface them (every 21st pair is planted).
  constexpr std::size_t kTotal = 10500;
  constexpr std::size_t kSrcLen = 100;
  std::vector<bool> planted(kTotal);
  std::vector<double> ratios(kTotal);
  for (std::size_t i = 0; i < kTotal; ++i) {
    planted[i] = (i % 21 == 20);
    const double raw =
        planted[i] ? sampler.next(3.0, 0.3) : sampler.next(1.0, 0.1);
    const auto tgt_len = static_cast<std::size_t>(
        std::max<long>(1, std::lround(raw * kSrcLen)));
    ratios[i] = static_cast<double>(tgt_len) / kSrcLen;
  }

  statval::ValidationConfig config;  // stock thresholds
  const std::vector<double> sample(ratios.begin(),
                                   ratios.begin() + config.sample_size);
  const statval::RatioModel model =
      statval::fit_ratio_model(sample, config, "aa", "bb");

  std::size_t outliers_rejected = 0, outlier_total = 0;
  std::size_t clean_rejected = 0, clean_total = 0;
  statval::SentencePair pair;
  pair.id = "p";
  pair.src_lang = "aa";
  pair.tgt_lang = "bb";
  pair.src_text = std::string(kSrcLen, 'a');
  for (std::size_t i = 0; i < kTotal; ++i) {
    pair.tgt_text.assign(static_cast<std::size_t>(ratios[i] * kSrcLen + 0.5),
                         'b');
    const auto verdict = statval::validate_pair(pair, model, config);
    if (planted[i]) {
      ++outlier_total;
      if (!verdict.accepted) ++outliers_rejected;
    } else {
      ++clean_total;
      if (!verdict.accepted) ++clean_rejected;
    }
  }
  const double seconds = elapsed_ms(start) / 1000.0;

  const double recall =
      static_cast<double>(outliers_rejected) / outlier_total;
  const double fpr = static_cast<double>(clean_rejected) / clean_total;
  const bool recall_ok = recall >= 0.95;
  const bool fpr_ok = fpr <= 0.02;
  const bool fast_ok = seconds < 30.0;
  Outcome out;
  out.ok = recall_ok && fpr_ok && fast_ok;
  out.detail = fmt(
      "%zu/%zu planted outliers rejected (%.1f%% >= 95%% %s), false positives "
      "%zu/%zu (%.2f%% <= 2%% %s), %.2fs (<30s %s)",
      outliers_rejected, outlier_total, recall * 100.0,
      recall_ok ? "ok" : "MISS", clean_rejected, clean_total, fpr * 100.0,
      fpr_ok ? "ok" : "MISS", seconds, fast_ok ? "ok" : "MISS");
  return out;
}

// ---- 7. density estimate calibration -------------------------------------

Outcome check_kde_calibration() {
  testsup::GaussianSampler sampler(90210);
  std::vector<double> sample;
  sample.reserve(10000);
  for (int i = 0; i < 10000; ++i) sample.push_back(sampler.next(0.0, 1.0));

  statval::ValidationConfig config;
  const statval::RatioModel model =
      statval::fit_ratio_model(sample, config, "aa", "bb");

  const double q1_err = std::abs(model.q1 - (-0.6745));
  const double q3_err = std::abs(model.q3 - 0.6745);
  const bool quartiles_ok = q1_err <= 0.05 && q3_err <= 0.05;

  const auto [min_it, max_it] =
      std::minmax_element(sample.begin(), sample.end());
  const double lo = *min_it - 10.0 * model.bandwidth;
  const double hi = *max_it + 10.0 * model.bandwidth;
  constexpr int kIntervals = 4000;  // composite Simpson rule
  const double h = (hi - lo) / kIntervals;
  double acc = statval::kde_density(model, lo) +
               statval::kde_density(model, hi);
  for (int i = 1; i < kIntervals; ++i) {
    acc += statval::kde_density(model, lo + i * h) * (i % 2 != 0 ? 4.0 : 2.0);
  }
  const double integral = acc * h / 3.0;
  const bool integral_ok = std::abs(integral - 1.0) <= 1e-3;

  Outcome out;
  out.ok = quartiles_ok && integral_ok;
  out.detail = fmt(
      "density integrates to %.6f (1 +- 1e-3 %s); n=10000 quartiles %.4f/%.4f "
      "vs -+0.6745 (err %.4f/%.4f <= 0.05 %s)",
      integral, integral_ok ? "ok" : "MISS", model.q1, model.q3, q1_err,
      q3_err, quartiles_ok ? "ok" : "MISS");
  return out;
}

// ---- 8 & 10. pipeline determinism and throughput -------------------------

struct PipelineRuns {
  fs::path corpus_path;
  fs::path config_path;
  std::map<std::size_t, fs::path> out_dirs;  // workers -> artifacts
  std::string error;  // nonempty if the setup failed
};

void generate_corpus(const fs::path& path, std::size_t pairs) {
  static const char* kSrcVocab[] = {
      "the",    "river",  "market", "story",  "teacher", "rain",  "harvest",
      "family", "road",   "music",  "moon",   "child",   "house", "fire",
      "bird",   "water",  "friend", "night",  "word",    "hand",  "tree",
      "song",   "mother", "father"};
  static const char* kTgtVocab[] = {
      "omi",    "oja",    "itan",   "olukoni", "ojo",   "ikore", "ebi",
      "ona",    "orin",   "osupa",  "omode",   "ile",   "ina",   "eye",
      "ore",    "oru",    "oro",    "owo",     "igi",   "iya",   "baba",
      "ilu",    "ala",    "ewe"};
  constexpr std::size_t kSrcWords = std::size(kSrcVocab);
  constexpr std::size_t kTgtWords = std::size(kTgtVocab);

  std::mt19937 rng(77);
  std::uniform_int_distribution<int> src_len(6, 14);
  std::uniform_int_distribution<int> jitter(-2, 2);
  std::uniform_int_distribution<std::size_t> src_pick(0, kSrcWords - 1);
  std::uniform_int_distribution<std::size_t> tgt_pick(0, kTgtWords - 1);

  std::ostringstream lines;
  for (std::size_t i = 0; i < pairs; ++i) {
    std::string src;
    const int n = src_len(rng);
    for (int w = 0; w < n; ++w) {
      if (w > 0) src.push_back(' ');
      src += kSrcVocab[src_pick(rng)];
    }
    std::string tgt;
    if (i % 5000 == 4999) {
      tgt = src;  // planted copy-through
    } else if (i % 7777 == 7776) {
      for (int r = 0; r < 8; ++r) {  // planted length explosion
        if (r > 0) tgt.push_back(' ');
        for (int w = 0; w < n; ++w) {
          if (w > 0) tgt.push_back(' ');
          tgt += kTgtVocab[tgt_pick(rng)];
        }
      }
    } else {
      const int m = std::clamp(n + jitter(rng), 4, 16);
      for (int w = 0; w < m; ++w) {
        if (w > 0) tgt.push_back(' ');
        tgt += kTgtVocab[tgt_pick(rng)];
      }
    }
    lines << src << '\t' << tgt << '\n';
  }
  testsup::write_file(path, lines.str());
}

const PipelineRuns& pipeline_runs() {
  static const PipelineRuns runs = [] {
    PipelineRuns state;
    try {
      const fs::path dir = testsup::scratch_dir("determinism");
      state.corpus_path = dir / "corpus.tsv";
      state.config_path = dir / "pipeline.conf";
      generate_corpus(state.corpus_path, 100000);
      testsup::write_file(state.config_path,
                          "source = tsv2, en, yo, " +
                              state.corpus_path.string() + "\n");
      for (const std::size_t workers : {1u, 4u, 8u}) {
        const fs::path out = dir / ("w" + std::to_string(workers));
        fs::create_directories(out);
        const std::string command =
            std::string("\"") + CORPUSQC_TOOL + "\" pipeline -c \"" +
            state.config_path.string() + "\" -o \"" + out.string() +
            "\" -j " + std::to_string(workers) + " > \"" +
            (dir / ("w" + std::to_string(workers) + ".log")).string() +
            "\" 2>&1";
        const int rc = std::system(command.c_str());
        if (rc != 0) {
          state.error = "pipeline exited with status " + std::to_string(rc) +
                        " at " + std::to_string(workers) + " workers";
          return state;
        }
        state.out_dirs[workers] = out;
      }
    } catch (const std::exception& err) {
      state.error = err.what();
    }
    return state;
  }();
  return runs;
}

Outcome check_determinism() {
  const PipelineRuns& runs = pipeline_runs();
  Outcome out;
  if (!runs.error.empty()) {
    out.detail = runs.error;
    return out;
  }
  static const char* kArtifacts[] = {
      "records.jsonl",  "dedup_report.json",       "malformed.txt",
      "models.json",    "validation_summary.json", "verdicts.jsonl"};
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const char* name : kArtifacts) {
    const std::string baseline =
        testsup::read_file(runs.out_dirs.at(1) / name);
    ++compared;
    for (const std::size_t workers : {4u, 8u}) {
      if (testsup::read_file(runs.out_dirs.at(workers) / name) != baseline) {
        differing.push_back(std::string(name) + "@" +
                            std::to_string(workers));
      }
    }
  }
  out.ok = differing.empty();
  std::ostringstream detail;
  detail << compared
         << " artifacts byte-identical at 1/4/8 workers over 100000 pairs";
  if (!differing.empty()) {
    detail << "; differing:";
    for (const auto& name : differing) detail << " " << name;
  }
  out.detail = detail.str();
  return out;
}

Outcome check_throughput() {
  const PipelineRuns& runs = pipeline_runs();
  Outcome out;
  if (!runs.error.empty()) {
    out.detail = runs.error;
    return out;
  }
  const auto summary = nlohmann::json::parse(
      testsup::read_file(runs.out_dirs.at(1) / "run_summary.json"));
  double normalize_ms = -1.0, validate_ms = -1.0, pairs = 0.0;
  for (const auto& stage : summary.at("stages")) {
    const std::string name = stage.at("name").get<std::string>();
    if (name == "normalize") {
      normalize_ms = stage.at("duration_ms").get<double>();
      pairs = stage.at("in").get<double>();
    } else if (name == "validate") {
      validate_ms = stage.at("duration_ms").get<double>();
    }
  }
  if (normalize_ms < 0.0 || validate_ms < 0.0 || pairs <= 0.0) {
    out.detail = "run summary is missing normalize/validate stage timings";
    return out;
  }
  const double minutes = (normalize_ms + validate_ms) / 60000.0;
  const double rate = pairs / minutes;
  out.ok = rate >= 100000.0;
  out.detail = fmt(
      "%.0f pairs normalized+validated in %.0fms single-core = %.0f "
      "pairs/minute (>= 100000 %s)",
      pairs, normalize_ms + validate_ms, rate, out.ok ? "ok" : "MISS");
  return out;
}

// ---- 9. normalization idempotence ----------------------------------------

Outcome check_idempotence() {
  std::mt19937 rng(424242);
  const normalize::CleanOptions opts;
  std::size_t strip_violations = 0;
  std::size_t symbol_violations = 0;
  std::size_t nfc_violations = 0;
  std::size_t clean_violations = 0;
  constexpr int kTrials = 10000;
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::string text = testsup::random_pathological_text(rng);

    const std::string stripped = normalize::strip_markup(text);
    if (normalize::strip_markup(stripped) != stripped) ++strip_violations;

    const std::string symbols = normalize::standardize_symbols(text);
    if (normalize::standardize_symbols(symbols) != symbols) {
      ++symbol_violations;
    }

    const std::string composed = uni::to_nfc(text);
    if (uni::to_nfc(composed) != composed) ++nfc_violations;

    const std::string cleaned = normalize::clean_text(text, opts).text;
    if (normalize::clean_text(cleaned, opts).text != cleaned) {
      ++clean_violations;
    }
  }
  const std::size_t total = strip_violations + symbol_violations +
                            nfc_violations + clean_violations;
  Outcome out;
  out.ok = total == 0;
  out.detail = fmt(
      "%d strings x 4 operations: %zu violations (markup %zu, symbols %zu, "
      "composition %zu, full clean %zu)",
      kTrials, total, strip_violations, symbol_violations, nfc_violations,
      clean_violations);
  return out;
}

}  // namespace

int main() {
  ::unsetenv("CORPUSQC_WORKERS");  // keep worker resolution deterministic

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks =
      {{"inventory totals", check_manifest_totals},
       {"tier assignments", check_tier_assignments},
       {"disparity ratio", check_disparity},
       {"review status grid", check_review_grid},
       {"metric scores", check_metric_scores},
       {"outlier filter efficacy", check_filter_efficacy},
       {"density calibration", check_kde_calibration},
       {"worker determinism", check_determinism},
       {"normalization idempotence", check_idempotence},
       {"single-core throughput", check_throughput}};

  std::size_t failures = 0;
  std::size_t index = 0;
  for (const auto& [name, run] : checks) {
    ++index;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& err) {
      outcome.ok = false;
      outcome.detail = std::string("exception: ") + err.what();
    }
    if (!outcome.ok) ++failures;
    std::printf("[%s] %2zu %-26s %s\n", outcome.ok ? "PASS" : "FAIL", index,
                name.c_str(), outcome.detail.c_str());
  }
  std::printf("%zu/%zu acceptance checks passed\n", checks.size() - failures,
              checks.size());
  return failures == 0 ? 0 : 1;
}
