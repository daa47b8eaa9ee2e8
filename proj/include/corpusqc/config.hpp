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

// Declarative pipeline configuration: a `key = value` file with one key per
// line and `#` comment lines.  Unknown keys and out-of-range values are
// rejected.  Repeatable keys: `source`, `review.seed`.

#ifndef CORPUSQC_CONFIG_HPP_
#define CORPUSQC_CONFIG_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "corpusqc/corpus.hpp"
#include "corpusqc/errors.hpp"
#include "corpusqc/metrics.hpp"
#include "corpusqc/normalize.hpp"
#include "corpusqc/review.hpp"
#include "corpusqc/statval.hpp"

namespace corpusqc::config {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error("config key '" + key + "': " + message), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct NormalizeSettings {
  normalize::DecodePolicy decode_policy = normalize::DecodePolicy::kReplace;
  bool strip_markup = true;
  bool standardize_symbols = true;
  bool normalize_unicode = true;
  std::string symbol_map_path;  // empty = built-in map
};

struct PipelineConfig {
  std::vector<corpus::SourceDescriptor> sources;
  std::string output_dir = "out";
  std::size_t workers = 1;

  NormalizeSettings normalize;
  std::map<std::string, std::string> ruleset_paths;  // language -> file

  statval::ValidationConfig validation;

  review::Thresholds review_thresholds;
  std::string review_log_path;
  std::vector<std::string> review_seeds;
  bool review_strict = false;

  metrics::MetricConfig metric_config;

  std::string inventory_path;
};

// Recognized keys (defaults in parentheses):
//   output_dir (out), workers (1)
//   source = format,src_lang,tgt_lang,path            [repeatable]
//   normalize.decode_policy = strict|replace (replace)
//   normalize.strip_markup / .standardize_symbols / .normalize_unicode (true)
//   normalize.symbol_map = path
//   ruleset.<language> = path
//   validate.sample_size (10000), validate.min_sample (100)
//   validate.z_max (3.0), validate.k_min (1.5), validate.k_max (3.0)
//   validate.cv_ref (0.5), validate.overlap_threshold (0.6)
//   validate.overlap_threshold.<src>-<tgt> = per-pair override
//   validate.overlap_check (true), validate.langid_gate (false)
//   review.min_upvotes_exclusive (5), review.max_downvotes_exclusive (3)
//   review.log = path, review.seed = id [repeatable], review.strict (false)
//   metrics.bleu.max_order (4), metrics.bleu.floor_smoothing (false),
//   metrics.bleu.floor (0.1)
//   metrics.chrf.char_max_order (6), metrics.chrf.word_max_order (2),
//   metrics.chrf.beta (2.0)
//   metrics.ter.allow_shifts (true), metrics.ter.max_shift_block (10)
//   manifest.inventory = path
PipelineConfig parse_config(std::istream& in, const std::string& name);
PipelineConfig load_config(const std::filesystem::path& path);

// Range checks shared by parse_config and programmatic construction.
void validate_config(const PipelineConfig& config);

}  // namespace corpusqc::config

#endif  // CORPUSQC_CONFIG_HPP_
