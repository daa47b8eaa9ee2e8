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

#ifndef CORPUSQC_LANGPROC_HPP_
#define CORPUSQC_LANGPROC_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpusqc/errors.hpp"

namespace corpusqc::langproc {

class RulesetError : public Error {
 public:
  RulesetError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct Rule {
  std::u32string lhs;
  std::u32string rhs;
};

// Ordered rewrite rules for one language. Kept sorted longest-lhs-first
// so a single left-to-right pass picks the longest match at each
// position.
struct RuleSet {
  std::string language;
  std::vector<Rule> rules;
  std::optional<std::string> family;
};

// Parses `LHS -> RHS` lines (U+XXXX codepoints, `#` comments). Raises
// RulesetError for parse failures, empty or duplicate sources.
RuleSet compile_ruleset(const std::filesystem::path& path,
                        const std::string& language = {});
RuleSet parse_ruleset(std::istream& in, const std::string& name,
                      const std::string& language = {});

// Returns one message per rule whose target contains some rule's source
// as a substring: those rule sets are not guaranteed idempotent and are
// rejected by the pipeline.
std::vector<std::string> lint_ruleset(const RuleSet& rules);

// Single left-to-right rewrite pass, longest source wins at each
// position; the result is re-normalized to canonical composed form.
std::string apply_ruleset(std::string_view text, const RuleSet& rules);

// Ranked character n-gram profile (n = 1..max_n, most frequent first).
struct LanguageProfile {
  std::string language;
  // (n-gram as UTF-8, rank starting at 1)
  std::vector<std::pair<std::string, std::uint32_t>> ngrams;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("cannot build a profile from an empty corpus") {}
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("cannot identify the language of empty text") {}
};

class NoProfiles : public Error {
 public:
  NoProfiles() : Error("no language profiles supplied") {}
};

struct ProfileConfig {
  std::size_t max_ngrams = 300;
  int max_n = 4;
};

// Frequency-ranked n-gram profile; ties broken by codepoint order so
// the result is deterministic for a fixed corpus.
LanguageProfile build_profile(std::span<const std::string> corpus,
                              const std::string& language,
                              const ProfileConfig& config = {});

// All profile languages sorted ascending by out-of-place distance to
// the text's own profile, ties broken by language code. Missing n-grams
// cost the candidate profile's length.
std::vector<std::pair<std::string, std::uint64_t>> identify_language(
    std::string_view text, std::span<const LanguageProfile> profiles,
    const ProfileConfig& config = {});

// JSON-lines serialization: {"language":..., "ngrams":[[gram,rank],...]}.
void save_profiles(const std::filesystem::path& path,
                   std::span<const LanguageProfile> profiles);
std::vector<LanguageProfile> load_profiles(const std::filesystem::path& path);

}  // namespace corpusqc::langproc

#endif  // CORPUSQC_LANGPROC_HPP_
