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

#include "corpusqc/config.hpp"

#include <fstream>
#include <istream>

namespace corpusqc::config {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  const long long parsed = parse_int(key, value);
  if (parsed < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(parsed);
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(value.substr(start)));
      return fields;
    }
    fields.push_back(trim(value.substr(start, comma - start)));
    start = comma + 1;
  }
}

void apply_key(PipelineConfig& config, const std::string& key,
               const std::string& value) {
  if (key == "output_dir") {
    config.output_dir = value;
  } else if (key == "workers") {
    config.workers = parse_size(key, value);
  } else if (key == "source") {
    const auto fields = split_commas(value);
    if (fields.size() != 4) {
      throw ConfigError(key,
                        "expected format,src_lang,tgt_lang,path; got '" +
                            value + "'");
    }
    corpus::SourceDescriptor descriptor;
    try {
      descriptor.format = corpus::parse_source_format(fields[0]);
    } catch (const Error& err) {
      throw ConfigError(key, err.what());
    }
    descriptor.src_lang = fields[1];
    descriptor.tgt_lang = fields[2];
    descriptor.path = fields[3];
    if (descriptor.path.empty()) throw ConfigError(key, "path is empty");
    config.sources.push_back(std::move(descriptor));
  } else if (key == "normalize.decode_policy") {
    if (value == "strict") {
      config.normalize.decode_policy = normalize::DecodePolicy::kStrict;
    } else if (value == "replace") {
      config.normalize.decode_policy = normalize::DecodePolicy::kReplace;
    } else {
      throw ConfigError(key, "expected strict or replace, got '" + value + "'");
    }
  } else if (key == "normalize.strip_markup") {
    config.normalize.strip_markup = parse_bool(key, value);
  } else if (key == "normalize.standardize_symbols") {
    config.normalize.standardize_symbols = parse_bool(key, value);
  } else if (key == "normalize.normalize_unicode") {
    config.normalize.normalize_unicode = parse_bool(key, value);
  } else if (key == "normalize.symbol_map") {
    config.normalize.symbol_map_path = value;
  } else if (key.starts_with("ruleset.")) {
    const std::string language = key.substr(8);
    if (language.empty()) throw ConfigError(key, "missing language code");
    if (!config.ruleset_paths.emplace(language, value).second) {
      throw ConfigError(key, "duplicate ruleset for language " + language);
    }
  } else if (key == "validate.sample_size") {
    config.validation.sample_size = parse_size(key, value);
  } else if (key == "validate.min_sample") {
    config.validation.min_sample = parse_size(key, value);
  } else if (key == "validate.z_max") {
    config.validation.z_max = parse_double(key, value);
  } else if (key == "validate.k_min") {
    config.validation.k_min = parse_double(key, value);
  } else if (key == "validate.k_max") {
    config.validation.k_max = parse_double(key, value);
  } else if (key == "validate.cv_ref") {
    config.validation.cv_ref = parse_double(key, value);
  } else if (key == "validate.overlap_threshold") {
    config.validation.overlap_threshold = parse_double(key, value);
  } else if (key.starts_with("validate.overlap_threshold.")) {
    const std::string pair = key.substr(27);
    if (pair.find('-') == std::string::npos) {
      throw ConfigError(key, "expected <src>-<tgt> suffix");
    }
    config.validation.overlap_overrides[pair] = parse_double(key, value);
  } else if (key == "validate.overlap_check") {
    config.validation.overlap_check = parse_bool(key, value);
  } else if (key == "validate.langid_gate") {
    config.validation.langid_gate = parse_bool(key, value);
  } else if (key == "review.min_upvotes_exclusive") {
    config.review_thresholds.min_upvotes_exclusive =
        static_cast<std::uint32_t>(parse_size(key, value));
  } else if (key == "review.max_downvotes_exclusive") {
    config.review_thresholds.max_downvotes_exclusive =
        static_cast<std::uint32_t>(parse_size(key, value));
  } else if (key == "review.log") {
    config.review_log_path = value;
  } else if (key == "review.seed") {
    config.review_seeds.push_back(value);
  } else if (key == "review.strict") {
    config.review_strict = parse_bool(key, value);
  } else if (key == "metrics.bleu.max_order") {
    config.metric_config.bleu.max_order =
        static_cast<int>(parse_int(key, value));
  } else if (key == "metrics.bleu.floor_smoothing") {
    config.metric_config.bleu.floor_smoothing = parse_bool(key, value);
  } else if (key == "metrics.bleu.floor") {
    config.metric_config.bleu.floor = parse_double(key, value);
  } else if (key == "metrics.chrf.char_max_order") {
    config.metric_config.chrf.char_max_order =
        static_cast<int>(parse_int(key, value));
  } else if (key == "metrics.chrf.word_max_order") {
    config.metric_config.chrf.word_max_order =
        static_cast<int>(parse_int(key, value));
  } else if (key == "metrics.chrf.beta") {
    config.metric_config.chrf.beta = parse_double(key, value);
  } else if (key == "metrics.ter.allow_shifts") {
    config.metric_config.ter.allow_shifts = parse_bool(key, value);
  } else if (key == "metrics.ter.max_shift_block") {
    config.metric_config.ter.max_shift_block =
        static_cast<int>(parse_int(key, value));
  } else if (key == "manifest.inventory") {
    config.inventory_path = value;
  } else {
    throw ConfigError(key, "unknown key");
  }
}

}  // namespace

PipelineConfig parse_config(std::istream& in, const std::string& name) {
  PipelineConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(line_no),
                        "expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(name + ":" + std::to_string(line_no), "empty key");
    }
    apply_key(config, key, value);
  }
  validate_config(config);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  return parse_config(in, path.string());
}

void validate_config(const PipelineConfig& config) {
  const auto& v = config.validation;
  if (v.sample_size == 0) {
    throw ConfigError("validate.sample_size", "must be at least 1");
  }
  if (v.min_sample < 2) {
    throw ConfigError("validate.min_sample", "must be at least 2");
  }
  if (v.min_sample > v.sample_size) {
    throw ConfigError("validate.min_sample",
                      "must not exceed validate.sample_size");
  }
  if (!(v.z_max > 0.0)) {
    throw ConfigError("validate.z_max", "must be positive");
  }
  if (v.k_min < 0.0) {
    throw ConfigError("validate.k_min", "must be non-negative");
  }
  if (v.k_max < v.k_min) {
    throw ConfigError("validate.k_max", "must be at least validate.k_min");
  }
  if (!(v.cv_ref > 0.0)) {
    throw ConfigError("validate.cv_ref", "must be positive");
  }
  if (v.overlap_threshold < 0.0 || v.overlap_threshold > 1.0) {
    throw ConfigError("validate.overlap_threshold", "must be within [0, 1]");
  }
  for (const auto& [pair, threshold] : v.overlap_overrides) {
    if (threshold < 0.0 || threshold > 1.0) {
      throw ConfigError("validate.overlap_threshold." + pair,
                        "must be within [0, 1]");
    }
  }
  const auto& m = config.metric_config;
  if (m.bleu.max_order < 1) {
    throw ConfigError("metrics.bleu.max_order", "must be at least 1");
  }
  if (!(m.bleu.floor > 0.0)) {
    throw ConfigError("metrics.bleu.floor", "must be positive");
  }
  if (m.chrf.char_max_order < 1) {
    throw ConfigError("metrics.chrf.char_max_order", "must be at least 1");
  }
  if (m.chrf.word_max_order < 0) {
    throw ConfigError("metrics.chrf.word_max_order", "must be non-negative");
  }
  if (!(m.chrf.beta > 0.0)) {
    throw ConfigError("metrics.chrf.beta", "must be positive");
  }
  if (m.ter.max_shift_block < 1) {
    throw ConfigError("metrics.ter.max_shift_block", "must be at least 1");
  }
}

}  // namespace corpusqc::config
