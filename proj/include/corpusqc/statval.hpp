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

#ifndef CORPUSQC_STATVAL_HPP_
#define CORPUSQC_STATVAL_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "corpusqc/errors.hpp"
#include "corpusqc/langproc.hpp"

namespace corpusqc::statval {

// One bitext record after both normalization tiers.
struct SentencePair {
  std::string id;
  std::string src_lang;
  std::string tgt_lang;
  std::string src_text;
  std::string tgt_text;
  std::string origin;
};

struct ValidationConfig {
  std::size_t sample_size = 10000;  // pairs fitted per language pair
  std::size_t min_sample = 100;
  double z_max = 3.0;
  double k_min = 1.5;
  double k_max = 3.0;
  double cv_ref = 0.5;
  double overlap_threshold = 0.6;
  bool overlap_check = true;
  bool langid_gate = false;
  // Per-pair overlap threshold overrides, keyed "src-tgt".
  std::map<std::string, double> overlap_overrides;

  double overlap_threshold_for(const std::string& src,
                               const std::string& tgt) const;
};

// Fitted character-ratio distribution for one language pair. Quartiles
// come from the KDE cumulative distribution, fences from the adaptive
// Tukey multiplier.
struct RatioModel {
  std::string src_lang;
  std::string tgt_lang;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population convention (divide by n)
  bool degenerate = false;
  double bandwidth = 0.0;
  std::vector<double> sample;  // retained fitting sample
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double cv = 0.0;
  double k = 0.0;
  double fence_lo = 0.0;
  double fence_hi = 0.0;
  double z_max = 3.0;
};

enum class Reason {
  kRatioOutOfFence,
  kZExceeded,
  kOverlapArtifact,
  kLanguageMismatch,
  kEmptyTarget,
  kEmptySource,
};

const char* reason_name(Reason reason);

struct ValidationVerdict {
  std::string id;
  bool accepted = false;
  double ratio = 0.0;
  std::optional<double> z;  // absent when the model is degenerate
  double overlap = 0.0;
  std::vector<Reason> reasons;  // sorted, duplicate-free
};

class EmptySource : public Error {
 public:
  EmptySource() : Error("source text is empty") {}
};

class EmptyTarget : public Error {
 public:
  EmptyTarget() : Error("target text is empty") {}
};

class InsufficientSample : public Error {
 public:
  InsufficientSample(std::size_t n, std::size_t min)
      : Error("sample of " + std::to_string(n) +
              " ratios is below the minimum of " + std::to_string(min)),
        n_(n),
        min_(min) {}
  std::size_t n() const { return n_; }
  std::size_t min() const { return min_; }

 private:
  std::size_t n_;
  std::size_t min_;
};

class DegenerateDistribution : public Error {
 public:
  DegenerateDistribution()
      : Error("z-score undefined for a zero-variance distribution") {}
};

// Target/source length ratio in Unicode scalars.
double char_ratio(const SentencePair& pair);

// Fence multiplier as a function of the coefficient of variation:
// k_min + (k_max - k_min) * min(1, cv / cv_ref). Nondecreasing in cv.
double adaptive_multiplier(double cv, const ValidationConfig& config);

RatioModel fit_ratio_model(std::span<const double> sample,
                           const ValidationConfig& config,
                           const std::string& src_lang = {},
                           const std::string& tgt_lang = {});

double zscore(double ratio, const RatioModel& model);

// Gaussian-kernel density and CDF of the fitted sample.
double kde_density(const RatioModel& model, double x);
double kde_cdf(const RatioModel& model, double x);

// Distinct character n-gram containment of target in source,
// n = min(4, target length); whitespace counts as characters.
double overlap_containment(const SentencePair& pair);

// Runs all enabled checks; reasons accumulate independently and the
// pair is accepted iff none fire. Empty source/target become verdict
// reasons, not exceptions.
ValidationVerdict validate_pair(
    const SentencePair& pair, const RatioModel& model,
    const ValidationConfig& config,
    std::span<const langproc::LanguageProfile> profiles = {});

nlohmann::ordered_json model_to_json(const RatioModel& model,
                             const ValidationConfig& config);
RatioModel model_from_json(const nlohmann::json& j);
nlohmann::ordered_json verdict_to_json(const ValidationVerdict& verdict);

}  // namespace corpusqc::statval

#endif  // CORPUSQC_STATVAL_HPP_
