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

#include "corpusqc/statval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "corpusqc/unicode.hpp"

namespace corpusqc::statval {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kCvCap = 1e12;  // keeps the stored cv JSON-serializable

double standard_normal_cdf(double u) { return 0.5 * std::erfc(-u * kInvSqrt2); }

// Type-7 (linear interpolation) quantile of a sorted sample.
double raw_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Solves kde_cdf(x) = target by bisection to an interval of width 1e-6.
double kde_quantile(const RatioModel& model, double target) {
  const auto [min_it, max_it] =
      std::minmax_element(model.sample.begin(), model.sample.end());
  double lo = *min_it - 10.0 * model.bandwidth;
  double hi = *max_it + 10.0 * model.bandwidth;
  for (int iter = 0; iter < 200 && hi - lo > 1e-6; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (kde_cdf(model, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ValidationConfig::overlap_threshold_for(const std::string& src,
                                               const std::string& tgt) const {
  const auto it = overlap_overrides.find(src + "-" + tgt);
  return it != overlap_overrides.end() ? it->second : overlap_threshold;
}

const char* reason_name(Reason reason) {
  switch (reason) {
    case Reason::kRatioOutOfFence: return "RatioOutOfFence";
    case Reason::kZExceeded: return "ZExceeded";
    case Reason::kOverlapArtifact: return "OverlapArtifact";
    case Reason::kLanguageMismatch: return "LanguageMismatch";
    case Reason::kEmptyTarget: return "EmptyTarget";
    case Reason::kEmptySource: return "EmptySource";
  }
  return "?";
}

double char_ratio(const SentencePair& pair) {
  const std::size_t src_len = uni::scalar_count(pair.src_text);
  if (src_len == 0) throw EmptySource();
  const std::size_t tgt_len = uni::scalar_count(pair.tgt_text);
  if (tgt_len == 0) throw EmptyTarget();
  return static_cast<double>(tgt_len) / static_cast<double>(src_len);
}

double adaptive_multiplier(double cv, const ValidationConfig& config) {
  const double scaled = std::min(1.0, cv / config.cv_ref);
  return config.k_min + (config.k_max - config.k_min) * scaled;
}

RatioModel fit_ratio_model(std::span<const double> sample,
                           const ValidationConfig& config,
                           const std::string& src_lang,
                           const std::string& tgt_lang) {
  if (sample.size() > config.sample_size) {
    sample = sample.first(config.sample_size);
  }
  if (sample.size() < config.min_sample) {
    throw InsufficientSample(sample.size(), config.min_sample);
  }

  RatioModel model;
  model.src_lang = src_lang;
  model.tgt_lang = tgt_lang;
  model.n = sample.size();
  model.sample.assign(sample.begin(), sample.end());
  model.z_max = config.z_max;

  const double n = static_cast<double>(model.n);
  double sum = 0.0;
  for (double x : sample) sum += x;
  model.mean = sum / n;
  double ss = 0.0;
  for (double x : sample) {
    const double d = x - model.mean;
    ss += d * d;
  }
  model.stddev = std::sqrt(ss / n);
  model.degenerate = model.stddev == 0.0;

  if (model.stddev == 0.0) {
    model.cv = 0.0;
  } else if (model.mean == 0.0) {
    model.cv = kCvCap;
  } else {
    model.cv = std::min(model.stddev / std::abs(model.mean), kCvCap);
  }
  model.k = adaptive_multiplier(model.cv, config);

  if (model.degenerate) {
    // All ratios equal: point fences at the common value, z undefined.
    const double value = model.sample.front();
    model.q1 = model.q3 = value;
    model.iqr = 0.0;
    model.fence_lo = model.fence_hi = value;
    model.bandwidth = 0.0;
    return model;
  }

  std::vector<double> sorted = model.sample;
  std::sort(sorted.begin(), sorted.end());
  const double raw_iqr = raw_quantile(sorted, 0.75) - raw_quantile(sorted, 0.25);

  // Silverman's rule of thumb; falls back to sigma alone when the raw
  // IQR collapses.
  double spread = std::min(model.stddev, raw_iqr / 1.34);
  if (spread <= 0.0) spread = model.stddev;
  model.bandwidth = 0.9 * spread * std::pow(n, -0.2);

  model.q1 = kde_quantile(model, 0.25);
  model.q3 = kde_quantile(model, 0.75);
  model.iqr = model.q3 - model.q1;
  model.fence_lo = model.q1 - model.k * model.iqr;
  model.fence_hi = model.q3 + model.k * model.iqr;
  return model;
}

double zscore(double ratio, const RatioModel& model) {
  if (model.degenerate || model.stddev == 0.0) {
    throw DegenerateDistribution();
  }
  return (ratio - model.mean) / model.stddev;
}

double kde_density(const RatioModel& model, double x) {
  if (model.degenerate) throw DegenerateDistribution();
  const double h = model.bandwidth;
  double acc = 0.0;
  for (double xi : model.sample) {
    const double u = (x - xi) / h;
    acc += std::exp(-0.5 * u * u);
  }
  return acc * kInvSqrt2Pi / (static_cast<double>(model.n) * h);
}

double kde_cdf(const RatioModel& model, double x) {
  if (model.degenerate) throw DegenerateDistribution();
  const double h = model.bandwidth;
  double acc = 0.0;
  for (double xi : model.sample) {
    acc += standard_normal_cdf((x - xi) / h);
  }
  return acc / static_cast<double>(model.n);
}

double overlap_containment(const SentencePair& pair) {
  const std::u32string tgt = uni::decode_utf8_lossy(pair.tgt_text);
  if (tgt.empty()) throw EmptyTarget();
  const std::size_t n = std::min<std::size_t>(4, tgt.size());

  const std::u32string src = uni::decode_utf8_lossy(pair.src_text);
  std::unordered_set<std::string> src_grams;
  if (src.size() >= n) {
    src_grams.reserve(src.size());
    for (std::size_t i = 0; i + n <= src.size(); ++i) {
      src_grams.insert(
          uni::encode_utf8(std::u32string_view(src).substr(i, n)));
    }
  }

  std::unordered_set<std::string> tgt_grams;
  tgt_grams.reserve(tgt.size());
  for (std::size_t i = 0; i + n <= tgt.size(); ++i) {
    tgt_grams.insert(uni::encode_utf8(std::u32string_view(tgt).substr(i, n)));
  }
  std::size_t contained = 0;
  for (const std::string& gram : tgt_grams) {
    if (src_grams.contains(gram)) ++contained;
  }
  return static_cast<double>(contained) / static_cast<double>(tgt_grams.size());
}

ValidationVerdict validate_pair(
    const SentencePair& pair, const RatioModel& model,
    const ValidationConfig& config,
    std::span<const langproc::LanguageProfile> profiles) {
  ValidationVerdict verdict;
  verdict.id = pair.id;

  const bool src_empty = uni::scalar_count(pair.src_text) == 0;
  const bool tgt_empty = uni::scalar_count(pair.tgt_text) == 0;
  if (src_empty) verdict.reasons.push_back(Reason::kEmptySource);
  if (tgt_empty) verdict.reasons.push_back(Reason::kEmptyTarget);

  if (!src_empty && !tgt_empty) {
    verdict.ratio = char_ratio(pair);
    if (verdict.ratio < model.fence_lo || verdict.ratio > model.fence_hi) {
      verdict.reasons.push_back(Reason::kRatioOutOfFence);
    }
    if (!model.degenerate) {
      verdict.z = zscore(verdict.ratio, model);
      if (std::abs(*verdict.z) > model.z_max) {
        verdict.reasons.push_back(Reason::kZExceeded);
      }
    }
  }
  if (!tgt_empty) {
    verdict.overlap = overlap_containment(pair);
    if (config.overlap_check &&
        verdict.overlap >
            config.overlap_threshold_for(pair.src_lang, pair.tgt_lang)) {
      verdict.reasons.push_back(Reason::kOverlapArtifact);
    }
    if (config.langid_gate && !profiles.empty()) {
      const auto ranking = langproc::identify_language(pair.tgt_text, profiles);
      if (ranking.front().first != pair.tgt_lang) {
        verdict.reasons.push_back(Reason::kLanguageMismatch);
      }
    }
  }

  std::sort(verdict.reasons.begin(), verdict.reasons.end());
  verdict.reasons.erase(
      std::unique(verdict.reasons.begin(), verdict.reasons.end()),
      verdict.reasons.end());
  verdict.accepted = verdict.reasons.empty();
  return verdict;
}

nlohmann::ordered_json model_to_json(const RatioModel& model,
                             const ValidationConfig& config) {
  ordered_json j;
  j["src_lang"] = model.src_lang;
  j["tgt_lang"] = model.tgt_lang;
  j["n"] = model.n;
  j["mean"] = model.mean;
  j["stddev"] = model.stddev;
  j["degenerate"] = model.degenerate;
  j["bandwidth"] = model.bandwidth;
  j["q1"] = model.q1;
  j["q3"] = model.q3;
  j["iqr"] = model.iqr;
  j["cv"] = model.cv;
  j["k"] = model.k;
  j["fence_lo"] = model.fence_lo;
  j["fence_hi"] = model.fence_hi;
  j["z_max"] = model.z_max;
  j["sample"] = model.sample;
  ordered_json cfg;
  cfg["sample_size"] = config.sample_size;
  cfg["min_sample"] = config.min_sample;
  cfg["z_max"] = config.z_max;
  cfg["k_min"] = config.k_min;
  cfg["k_max"] = config.k_max;
  cfg["cv_ref"] = config.cv_ref;
  cfg["overlap_threshold"] = config.overlap_threshold;
  cfg["overlap_check"] = config.overlap_check;
  cfg["langid_gate"] = config.langid_gate;
  j["config"] = std::move(cfg);
  return j;
}

RatioModel model_from_json(const nlohmann::json& j) {
  RatioModel model;
  model.src_lang = j.at("src_lang").get<std::string>();
  model.tgt_lang = j.at("tgt_lang").get<std::string>();
  model.n = j.at("n").get<std::size_t>();
  model.mean = j.at("mean").get<double>();
  model.stddev = j.at("stddev").get<double>();
  model.degenerate = j.at("degenerate").get<bool>();
  model.bandwidth = j.at("bandwidth").get<double>();
  model.q1 = j.at("q1").get<double>();
  model.q3 = j.at("q3").get<double>();
  model.iqr = j.at("iqr").get<double>();
  model.cv = j.at("cv").get<double>();
  model.k = j.at("k").get<double>();
  model.fence_lo = j.at("fence_lo").get<double>();
  model.fence_hi = j.at("fence_hi").get<double>();
  model.z_max = j.at("z_max").get<double>();
  model.sample = j.at("sample").get<std::vector<double>>();
  return model;
}

nlohmann::ordered_json verdict_to_json(const ValidationVerdict& verdict) {
  ordered_json j;
  j["id"] = verdict.id;
  j["accepted"] = verdict.accepted;
  j["ratio"] = verdict.ratio;
  if (verdict.z) {
    j["z"] = *verdict.z;
  } else {
    j["z"] = nullptr;
  }
  j["overlap"] = verdict.overlap;
  auto reasons = ordered_json::array();
  for (Reason reason : verdict.reasons) reasons.push_back(reason_name(reason));
  j["reasons"] = std::move(reasons);
  return j;
}

}  // namespace corpusqc::statval
