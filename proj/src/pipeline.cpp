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

#include "corpusqc/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "corpusqc/langproc.hpp"
#include "corpusqc/metrics.hpp"
#include "corpusqc/normalize.hpp"
#include "corpusqc/review.hpp"
#include "corpusqc/statval.hpp"

namespace corpusqc::pipeline {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string utc_now_iso8601() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

class StageTimer {
 public:
  explicit StageTimer(StageStats& stats)
      : stats_(stats), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    stats_.duration_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start_)
            .count();
  }

 private:
  StageStats& stats_;
  std::chrono::steady_clock::time_point start_;
};

std::string pair_key(const std::string& src_lang, const std::string& tgt_lang) {
  return src_lang + "\x1f" + tgt_lang;
}

std::vector<std::string> read_lines(const std::string& path) {
  if (!std::filesystem::exists(path)) throw corpus::MissingFile(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

ordered_json stage_to_json(const StageStats& stats) {
  ordered_json j;
  j["name"] = stats.name;
  j["in"] = stats.in;
  j["out"] = stats.out;
  if (stats.dropped) j["dropped"] = stats.dropped;
  if (stats.malformed) j["malformed"] = stats.malformed;
  if (stats.accepted || stats.rejected) {
    j["accepted"] = stats.accepted;
    j["rejected"] = stats.rejected;
  }
  if (stats.skipped) j["skipped"] = stats.skipped;
  j["duration_ms"] = stats.duration_ms;
  return j;
}

}  // namespace

std::size_t resolve_workers(std::size_t flag_value,
                            const config::PipelineConfig& config) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("CORPUSQC_WORKERS")) {
    try {
      std::size_t used = 0;
      const long long parsed = std::stoll(env, &used);
      if (used != std::string(env).size() || parsed < 1) {
        throw std::invalid_argument("");
      }
      return static_cast<std::size_t>(parsed);
    } catch (const std::exception&) {
      throw config::ConfigError("CORPUSQC_WORKERS",
                                std::string("expected a positive integer, "
                                            "got '") +
                                    env + "'");
    }
  }
  return config.workers > 0 ? config.workers : 1;
}

const StageStats* RunSummary::stage(const std::string& name) const {
  for (const StageStats& stats : stages) {
    if (stats.name == name) return &stats;
  }
  return nullptr;
}

nlohmann::ordered_json RunSummary::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["workers"] = workers;
  j["started_at"] = started_at;
  j["duration_ms"] = duration_ms;
  auto stage_array = ordered_json::array();
  for (const StageStats& stats : stages) {
    stage_array.push_back(stage_to_json(stats));
  }
  j["stages"] = std::move(stage_array);

  ordered_json reconciliation = ordered_json::object();
  bool balanced = true;
  if (const StageStats* ingest = stage("ingest")) {
    const std::size_t blank =
        ingest->in - ingest->out - ingest->malformed;
    reconciliation["lines_read"] = ingest->in;
    reconciliation["records"] = ingest->out;
    reconciliation["malformed"] = ingest->malformed;
    reconciliation["blank"] = blank;
    balanced = balanced &&
               ingest->in == ingest->out + ingest->malformed + blank;
    if (const StageStats* dedup = stage("dedup")) {
      reconciliation["duplicates"] = dedup->dropped;
      reconciliation["kept"] = dedup->out;
      balanced = balanced && dedup->in == dedup->out + dedup->dropped &&
                 dedup->in == ingest->out;
    }
  }
  if (const StageStats* validate = stage("validate")) {
    reconciliation["validated"] = validate->in;
    reconciliation["accepted"] = validate->accepted;
    reconciliation["rejected"] = validate->rejected;
    reconciliation["unmodeled"] = validate->skipped;
    balanced = balanced && validate->in == validate->accepted +
                                               validate->rejected +
                                               validate->skipped;
  }
  reconciliation["balanced"] = balanced;
  j["reconciliation"] = std::move(reconciliation);
  j["artifacts"] = artifacts;
  j["errors"] = errors;
  return j;
}

Runner::Runner(config::PipelineConfig config, std::filesystem::path out_dir,
               std::size_t workers)
    : config_(std::move(config)),
      out_dir_(std::move(out_dir)),
      workers_(workers == 0 ? 1 : workers) {
  std::filesystem::create_directories(out_dir_);
}

void Runner::write_text(const std::string& name, const std::string& content,
                        RunSummary& summary) {
  const std::filesystem::path path = out_dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
  summary.artifacts.push_back(name);
}

void Runner::write_json(const std::string& name, const nlohmann::ordered_json& j,
                        RunSummary& summary) {
  write_text(name, j.dump(2) + "\n", summary);
}

void Runner::finish(RunSummary& summary) {
  summary.duration_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - run_start_)
                            .count();
  const std::filesystem::path path = out_dir_ / "run_summary.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << summary.to_json().dump(2) << "\n";
}

Runner::Ingested Runner::ingest(RunSummary& summary) {
  Ingested data;
  StageStats ingest_stats;
  ingest_stats.name = "ingest";
  StageStats dedup_stats;
  dedup_stats.name = "dedup";
  corpus::Deduper deduper;
  {
    const StageTimer timer(ingest_stats);
    for (const corpus::SourceDescriptor& descriptor : config_.sources) {
      corpus::SourceReader reader(descriptor);
      corpus::DatasetRecord record;
      while (reader.next(record)) {
        ++ingest_stats.out;
        if (deduper.keep(record.to_pair())) {
          data.records.push_back(std::move(record));
        }
      }
      data.lines_read += reader.lines_read();
      for (const corpus::MalformedLine& bad : reader.malformed()) {
        data.malformed.push_back(bad);
        summary.errors.push_back(bad.origin + ":" +
                                 std::to_string(bad.line_no) + ": " +
                                 bad.message);
      }
    }
  }
  ingest_stats.in = data.lines_read;
  ingest_stats.malformed = data.malformed.size();
  data.dedup = deduper.report();
  dedup_stats.in = ingest_stats.out;
  dedup_stats.out = data.dedup.kept;
  dedup_stats.dropped = data.dedup.dropped;
  summary.stages.push_back(ingest_stats);
  summary.stages.push_back(dedup_stats);
  return data;
}

void Runner::normalize_stage(Ingested& data, RunSummary& summary) {
  StageStats stats;
  stats.name = "normalize";
  stats.in = data.records.size();

  normalize::CleanOptions options;
  options.decode_policy = config_.normalize.decode_policy;
  options.strip_markup = config_.normalize.strip_markup;
  options.standardize_symbols = config_.normalize.standardize_symbols;
  options.normalize_unicode = config_.normalize.normalize_unicode;
  normalize::SymbolMap custom_map;
  if (!config_.normalize.symbol_map_path.empty()) {
    custom_map = normalize::SymbolMap::load(config_.normalize.symbol_map_path);
    options.symbol_map = &custom_map;
  }

  std::map<std::string, langproc::RuleSet> rulesets;
  for (const auto& [language, path] : config_.ruleset_paths) {
    rulesets.emplace(language, langproc::compile_ruleset(path, language));
  }

  {
    const StageTimer timer(stats);
    auto cleaned = parallel_map_ordered(
        std::span<corpus::DatasetRecord>(data.records), workers_,
        [&](corpus::DatasetRecord& record) {
          corpus::DatasetRecord out = record;
          const auto clean_side = [&](std::string& text,
                                      const std::string& language) {
            normalize::RawRecord raw;
            raw.bytes = text;
            raw.origin = record.origin;
            text = normalize::clean(raw, options).text;
            const auto ruleset = rulesets.find(language);
            if (ruleset != rulesets.end()) {
              text = langproc::apply_ruleset(text, ruleset->second);
            }
          };
          clean_side(out.src_text, out.src_lang);
          if (!out.tgt_text.empty()) clean_side(out.tgt_text, out.tgt_lang);
          return out;
        });
    data.records = std::move(cleaned);
  }
  stats.out = data.records.size();
  summary.stages.push_back(stats);
}

void Runner::validate_stage(std::vector<corpus::DatasetRecord>& records,
                            RunSummary& summary) {
  StageStats fit_stats;
  fit_stats.name = "fit";
  StageStats stats;
  stats.name = "validate";
  stats.in = records.size();

  // Group records by language pair in first-appearance order.
  std::vector<std::string> group_order;
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string key = pair_key(records[i].src_lang, records[i].tgt_lang);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) group_order.push_back(key);
    it->second.push_back(i);
  }

  std::unordered_map<std::string, statval::RatioModel> models;
  auto models_json = ordered_json::array();
  {
    const StageTimer timer(fit_stats);
    fit_stats.in = group_order.size();
    for (const std::string& key : group_order) {
      const std::vector<std::size_t>& indices = groups.at(key);
      std::vector<double> ratios;
      ratios.reserve(std::min(indices.size(), config_.validation.sample_size));
      for (const std::size_t index : indices) {
        if (ratios.size() >= config_.validation.sample_size) break;
        try {
          ratios.push_back(statval::char_ratio(records[index].to_pair()));
        } catch (const Error&) {
          // Empty-sided pairs cannot contribute a ratio; they are still
          // validated (and rejected) below.
        }
      }
      const corpus::DatasetRecord& first = records[indices.front()];
      try {
        statval::RatioModel model =
            statval::fit_ratio_model(ratios, config_.validation,
                                     first.src_lang, first.tgt_lang);
        models_json.push_back(
            statval::model_to_json(model, config_.validation));
        models.emplace(key, std::move(model));
        ++fit_stats.out;
      } catch (const statval::InsufficientSample& err) {
        summary.errors.push_back("pair " + first.src_lang + "-" +
                                 first.tgt_lang + ": " + err.what());
      }
    }
  }
  summary.stages.push_back(fit_stats);
  write_json("models.json", models_json, summary);

  // Language-identification profiles are built from this run's own records
  // when the advisory gate is enabled.
  std::vector<langproc::LanguageProfile> profiles;
  if (config_.validation.langid_gate) {
    std::map<std::string, std::vector<std::string>> texts_by_language;
    for (const corpus::DatasetRecord& record : records) {
      if (!record.tgt_text.empty()) {
        texts_by_language[record.tgt_lang].push_back(record.tgt_text);
      }
    }
    for (const auto& [language, texts] : texts_by_language) {
      profiles.push_back(langproc::build_profile(texts, language));
    }
  }

  std::vector<std::optional<statval::ValidationVerdict>> verdicts;
  {
    const StageTimer timer(stats);
    verdicts = parallel_map_ordered(
        std::span<corpus::DatasetRecord>(records), workers_,
        [&](corpus::DatasetRecord& record)
            -> std::optional<statval::ValidationVerdict> {
          const auto model =
              models.find(pair_key(record.src_lang, record.tgt_lang));
          if (model == models.end()) return std::nullopt;
          return statval::validate_pair(record.to_pair(), model->second,
                                        config_.validation, profiles);
        });
  }

  struct GroupTally {
    std::size_t n = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::map<std::string, std::size_t> reasons;
    bool modeled = false;
  };
  std::map<std::string, GroupTally> tallies;
  std::ostringstream verdict_lines;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string key =
        pair_key(records[i].src_lang, records[i].tgt_lang);
    GroupTally& tally = tallies[key];
    ++tally.n;
    tally.modeled = models.contains(key);
    if (!verdicts[i]) {
      ++stats.skipped;
      continue;
    }
    records[i].verdict = verdicts[i];
    if (verdicts[i]->accepted) {
      ++stats.accepted;
      ++tally.accepted;
    } else {
      ++stats.rejected;
      ++tally.rejected;
    }
    for (const statval::Reason reason : verdicts[i]->reasons) {
      ++tally.reasons[statval::reason_name(reason)];
    }
    verdict_lines << statval::verdict_to_json(*verdicts[i]).dump() << "\n";
  }
  stats.out = stats.accepted + stats.rejected;
  summary.stages.push_back(stats);
  write_text("verdicts.jsonl", verdict_lines.str(), summary);

  auto summary_json = ordered_json::array();
  for (const std::string& key : group_order) {
    const GroupTally& tally = tallies.at(key);
    const std::size_t split = key.find('\x1f');
    ordered_json g;
    g["src_lang"] = key.substr(0, split);
    g["tgt_lang"] = key.substr(split + 1);
    g["records"] = tally.n;
    g["modeled"] = tally.modeled;
    g["accepted"] = tally.accepted;
    g["rejected"] = tally.rejected;
    ordered_json reasons = ordered_json::object();
    for (const auto& [name, count] : tally.reasons) reasons[name] = count;
    g["reasons"] = std::move(reasons);
    summary_json.push_back(std::move(g));
  }
  write_json("validation_summary.json", summary_json, summary);
}

void Runner::manifest_stage(RunSummary& summary) {
  StageStats stats;
  stats.name = "manifest";
  const StageTimer timer(stats);
  const auto rows = corpus::load_inventory(config_.inventory_path);
  stats.in = rows.size();
  const corpus::CorpusManifest manifest = corpus::build_manifest(rows);
  stats.out = manifest.entries.size();
  write_json("manifest.json", corpus::manifest_to_json(manifest), summary);
  write_text("manifest.txt", corpus::manifest_table(manifest), summary);
  write_text("manifest_tokens.svg", corpus::manifest_svg_tokens(manifest),
             summary);
  write_text("manifest_hours.svg", corpus::manifest_svg_hours(manifest),
             summary);
  summary.stages.push_back(stats);
}

namespace {

RunSummary make_summary(const std::string& command, std::size_t workers) {
  RunSummary summary;
  summary.command = command;
  summary.workers = workers;
  summary.started_at = utc_now_iso8601();
  return summary;
}

ordered_json dedup_report_json(const corpus::DedupReport& report) {
  ordered_json j;
  j["kept"] = report.kept;
  j["dropped"] = report.dropped;
  ordered_json origins = ordered_json::object();
  for (const auto& [origin, counts] : report.per_origin) {
    origins[origin] = {{"kept", counts.kept}, {"dropped", counts.dropped}};
  }
  j["per_origin"] = std::move(origins);
  return j;
}

std::string malformed_report(const std::vector<corpus::MalformedLine>& lines) {
  std::ostringstream out;
  for (const corpus::MalformedLine& bad : lines) {
    out << bad.origin << ":" << bad.line_no << ": " << bad.message << "\n";
  }
  return out.str();
}

}  // namespace

RunSummary Runner::run_normalize() {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("normalize", workers_);
  Ingested data = ingest(summary);
  normalize_stage(data, summary);
  std::ostringstream records_out;
  corpus::export_records(data.records, records_out);
  write_text("records.jsonl", records_out.str(), summary);
  write_json("dedup_report.json", dedup_report_json(data.dedup), summary);
  write_text("malformed.txt", malformed_report(data.malformed), summary);
  finish(summary);
  return summary;
}

RunSummary Runner::run_validate() {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("validate", workers_);
  Ingested data = ingest(summary);
  validate_stage(data.records, summary);
  finish(summary);
  return summary;
}

RunSummary Runner::run_review_replay() {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("review-replay", workers_);
  if (config_.review_log_path.empty()) {
    throw config::ConfigError("review.log",
                              "required for the review-replay command");
  }
  StageStats stats;
  stats.name = "replay";
  {
    const StageTimer timer(stats);
    if (!std::filesystem::exists(config_.review_log_path)) {
      throw corpus::MissingFile(config_.review_log_path);
    }
    std::ifstream in(config_.review_log_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + config_.review_log_path);
    const std::vector<review::ReviewEvent> events =
        review::parse_event_log(in);
    stats.in = events.size();
    std::set<std::string> seeds(config_.review_seeds.begin(),
                                config_.review_seeds.end());
    const review::ReplayResult result =
        review::replay_log(events, std::move(seeds),
                           config_.review_thresholds, config_.review_strict);
    stats.out = result.audit.applied_events;
    stats.malformed = result.audit.errors.size();
    write_json("review_state.json", review::state_to_json(result.state),
               summary);
    write_json("review_audit.json", review::audit_to_json(result.audit),
               summary);
    write_text("review_audit.txt", review::audit_table(result.audit), summary);
  }
  summary.stages.push_back(stats);
  finish(summary);
  return summary;
}

RunSummary Runner::run_manifest() {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("manifest", workers_);
  if (config_.inventory_path.empty()) {
    throw config::ConfigError("manifest.inventory",
                              "required for the manifest command");
  }
  manifest_stage(summary);
  finish(summary);
  return summary;
}

RunSummary Runner::run_eval(const std::string& system,
                            std::span<const EvalSet> sets) {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("eval", workers_);
  StageStats stats;
  stats.name = "eval";
  metrics::EvalReport report;
  report.system = system;
  report.config = config_.metric_config;
  {
    const StageTimer timer(stats);
    stats.in = sets.size();
    for (const EvalSet& set : sets) {
      const std::vector<std::string> hyps = read_lines(set.hyp_path);
      const std::vector<std::string> refs = read_lines(set.ref_path);
      report.per_language[set.language] =
          metrics::score_segments(hyps, refs, config_.metric_config);
      ++stats.out;
    }
  }
  write_json("eval_" + system + ".json", metrics::report_to_json(report),
             summary);
  summary.stages.push_back(stats);
  finish(summary);
  return summary;
}

RunSummary Runner::run_compare(std::span<const std::string> report_paths,
                               const std::string& baseline) {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("compare", workers_);
  StageStats stats;
  stats.name = "compare";
  {
    const StageTimer timer(stats);
    stats.in = report_paths.size();
    std::vector<metrics::EvalReport> reports;
    for (const std::string& path : report_paths) {
      if (!std::filesystem::exists(path)) throw corpus::MissingFile(path);
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("cannot open " + path);
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& err) {
        throw Error(path + ": " + err.what());
      }
      reports.push_back(metrics::report_from_json(j));
    }
    const metrics::Comparison comparison =
        metrics::build_comparison(reports, baseline);
    write_json("comparison.json", metrics::comparison_to_json(comparison),
               summary);
    write_text("comparison.txt", metrics::comparison_table(comparison),
               summary);
    stats.out = comparison.systems.size();
  }
  summary.stages.push_back(stats);
  finish(summary);
  return summary;
}

RunSummary Runner::run_pipeline() {
  run_start_ = std::chrono::steady_clock::now();
  RunSummary summary = make_summary("pipeline", workers_);
  Ingested data = ingest(summary);
  normalize_stage(data, summary);
  validate_stage(data.records, summary);
  std::ostringstream records_out;
  corpus::export_records(data.records, records_out);
  write_text("records.jsonl", records_out.str(), summary);
  write_json("dedup_report.json", dedup_report_json(data.dedup), summary);
  write_text("malformed.txt", malformed_report(data.malformed), summary);
  if (!config_.inventory_path.empty()) manifest_stage(summary);
  finish(summary);
  return summary;
}

}  // namespace corpusqc::pipeline
