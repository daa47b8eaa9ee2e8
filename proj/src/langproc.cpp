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

#include "corpusqc/langproc.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "corpusqc/unicode.hpp"

namespace corpusqc::langproc {

namespace {

using json = nlohmann::json;

std::string strip_comment(std::string line) {
  const auto hash = line.find('#');
  if (hash != std::string::npos) line.erase(hash);
  return line;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

RuleSet parse_ruleset(std::istream& in, const std::string& name,
                      const std::string& language) {
  RuleSet rules;
  rules.language = language;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;
    const auto arrow = line.find("->");
    const std::string where = name + ":" + std::to_string(line_no);
    if (arrow == std::string::npos) {
      throw RulesetError(where + ": missing '->'", line_no);
    }
    std::u32string lhs, rhs;
    try {
      lhs = uni::parse_codepoint_field(line.substr(0, arrow), where);
      rhs = uni::parse_codepoint_field(line.substr(arrow + 2), where);
    } catch (const Error& e) {
      throw RulesetError(e.what(), line_no);
    }
    if (lhs.empty()) {
      throw RulesetError(where + ": empty rule source", line_no);
    }
    for (const Rule& existing : rules.rules) {
      if (existing.lhs == lhs) {
        throw RulesetError(where + ": duplicate rule source", line_no);
      }
    }
    rules.rules.push_back(Rule{std::move(lhs), std::move(rhs)});
  }
  std::stable_sort(rules.rules.begin(), rules.rules.end(),
                   [](const Rule& a, const Rule& b) {
                     return a.lhs.size() > b.lhs.size();
                   });
  return rules;
}

RuleSet compile_ruleset(const std::filesystem::path& path,
                        const std::string& language) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ruleset: " + path.string());
  std::string lang = language;
  if (lang.empty()) lang = path.stem().string();
  return parse_ruleset(in, path.string(), lang);
}

std::vector<std::string> lint_ruleset(const RuleSet& rules) {
  std::vector<std::string> violations;
  for (const Rule& rule : rules.rules) {
    for (const Rule& other : rules.rules) {
      if (!other.lhs.empty() &&
          rule.rhs.find(other.lhs) != std::u32string::npos) {
        std::ostringstream msg;
        msg << "rule target for U+" << std::hex << std::uppercase
            << static_cast<std::uint32_t>(rule.lhs.front())
            << "... contains the source of another rule; rewriting is not "
               "idempotent";
        violations.push_back(msg.str());
      }
    }
  }
  return violations;
}

std::string apply_ruleset(std::string_view text, const RuleSet& rules) {
  if (rules.rules.empty()) return uni::to_nfc(text);
  const std::u32string in = uni::decode_utf8_lossy(text);
  std::u32string out;
  out.reserve(in.size());
  for (std::size_t i = 0; i < in.size();) {
    const Rule* matched = nullptr;
    for (const Rule& rule : rules.rules) {  // longest lhs first
      if (rule.lhs.size() <= in.size() - i &&
          in.compare(i, rule.lhs.size(), rule.lhs) == 0) {
        matched = &rule;
        break;
      }
    }
    if (matched) {
      out.append(matched->rhs);
      i += matched->lhs.size();
    } else {
      out.push_back(in[i]);
      ++i;
    }
  }
  return uni::to_nfc(uni::encode_utf8(out));
}

LanguageProfile build_profile(std::span<const std::string> corpus,
                              const std::string& language,
                              const ProfileConfig& config) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const std::string& line : corpus) {
    const std::u32string scalars = uni::decode_utf8_lossy(line);
    const int max_n =
        std::min<int>(config.max_n, static_cast<int>(scalars.size()));
    for (int n = 1; n <= max_n; ++n) {
      for (std::size_t i = 0; i + n <= scalars.size(); ++i) {
        ++counts[uni::encode_utf8(
            std::u32string_view(scalars).substr(i, n))];
      }
    }
  }
  if (counts.empty()) throw EmptyCorpus();

  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(),
                                                            counts.end());
  // Byte order on valid UTF-8 equals codepoint order, so the tie-break
  // is plain string comparison.
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > config.max_ngrams) ranked.resize(config.max_ngrams);

  LanguageProfile profile;
  profile.language = language;
  profile.ngrams.reserve(ranked.size());
  std::uint32_t rank = 1;
  for (auto& [gram, count] : ranked) {
    profile.ngrams.emplace_back(std::move(gram), rank++);
  }
  return profile;
}

std::vector<std::pair<std::string, std::uint64_t>> identify_language(
    std::string_view text, std::span<const LanguageProfile> profiles,
    const ProfileConfig& config) {
  if (text.empty()) throw EmptyText();
  if (profiles.empty()) throw NoProfiles();

  const std::string text_str(text);
  const LanguageProfile text_profile =
      build_profile(std::span<const std::string>(&text_str, 1), "", config);

  std::vector<std::pair<std::string, std::uint64_t>> result;
  result.reserve(profiles.size());
  for (const LanguageProfile& profile : profiles) {
    std::unordered_map<std::string_view, std::uint32_t> ranks;
    ranks.reserve(profile.ngrams.size());
    for (const auto& [gram, rank] : profile.ngrams) ranks.emplace(gram, rank);
    const std::uint64_t miss_cost = profile.ngrams.size();
    std::uint64_t distance = 0;
    for (const auto& [gram, rank] : text_profile.ngrams) {
      const auto it = ranks.find(gram);
      if (it == ranks.end()) {
        distance += miss_cost;
      } else {
        distance += rank > it->second ? rank - it->second : it->second - rank;
      }
    }
    result.emplace_back(profile.language, distance);
  }
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return result;
}

void save_profiles(const std::filesystem::path& path,
                   std::span<const LanguageProfile> profiles) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write profiles: " + path.string());
  for (const LanguageProfile& profile : profiles) {
    json row;
    row["language"] = profile.language;
    json grams = json::array();
    for (const auto& [gram, rank] : profile.ngrams) {
      grams.push_back(json::array({gram, rank}));
    }
    row["ngrams"] = std::move(grams);
    out << row.dump() << '\n';
  }
}

std::vector<LanguageProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profiles: " + path.string());
  std::vector<LanguageProfile> profiles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": " +
                  e.what());
    }
    LanguageProfile profile;
    profile.language = row.at("language").get<std::string>();
    for (const auto& pair : row.at("ngrams")) {
      profile.ngrams.emplace_back(pair.at(0).get<std::string>(),
                                  pair.at(1).get<std::uint32_t>());
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

}  // namespace corpusqc::langproc
