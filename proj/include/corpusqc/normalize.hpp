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

#ifndef CORPUSQC_NORMALIZE_HPP_
#define CORPUSQC_NORMALIZE_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpusqc/errors.hpp"

namespace corpusqc::normalize {

// One raw input line before any cleaning.
struct RawRecord {
  std::string bytes;
  std::optional<std::string> declared_encoding;  // defaults to UTF-8
  std::string origin;
  std::size_t line_no = 1;
};

// Output of the general cleaning tier. `text` is NFC, free of markup,
// entities and control characters (newline excepted), with single
// spaces and no surrounding whitespace.
struct CleanText {
  std::string text;
  std::vector<std::string> applied_steps;
};

enum class DecodePolicy { kStrict, kReplace };

class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& what)
      : Error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownEncoding : public Error {
 public:
  explicit UnknownEncoding(const std::string& label)
      : Error("unknown encoding: " + label) {}
};

// Decodes record bytes to UTF-8 text. Supported declared encodings:
// utf-8 (default), ascii, latin-1 and windows-1252. Under kReplace every
// undecodable byte becomes U+FFFD; under kStrict the first bad byte
// raises DecodeError with its offset.
std::string decode_bytes(const RawRecord& record, DecodePolicy policy);

// Canonical composed form (NFC). Idempotent.
std::string normalize_unicode(std::string_view text);

// Removes `<...>` tag spans and decodes named/numeric character
// entities, iterating until the text is stable so the operation is
// idempotent. A `<` with no `>` within 1024 scalars stays literal;
// unknown entities pass through verbatim.
std::string strip_markup(std::string_view text);

// Codepoint-sequence rewriting table for punctuation standardization.
// Loaded from a two-column text file (tab separated, each column a
// space-separated run of U+XXXX codepoints, `#` comments) or from the
// built-in table shipped with the toolkit.
class SymbolMap {
 public:
  static const SymbolMap& builtin();
  static SymbolMap load(const std::filesystem::path& path);
  static SymbolMap parse(std::istream& in, const std::string& name);

  const std::vector<std::pair<std::u32string, std::u32string>>& entries()
      const {
    return entries_;
  }

  // Longest-match rewrite at `pos`; returns match length or 0.
  std::size_t match(std::u32string_view text, std::size_t pos,
                    const std::u32string** rhs) const;

 private:
  void finalize(const std::string& name);
  std::vector<std::pair<std::u32string, std::u32string>> entries_;
};

// Applies the symbol map, drops C0/C1 controls (newline kept), folds
// space-like runs to single spaces and trims the ends.
std::string standardize_symbols(std::string_view text,
                                const SymbolMap& map = SymbolMap::builtin());

struct CleanOptions {
  DecodePolicy decode_policy = DecodePolicy::kReplace;
  bool strip_markup = true;
  bool standardize_symbols = true;
  bool normalize_unicode = true;
  const SymbolMap* symbol_map = nullptr;  // builtin when null
};

// Full general tier: decode, then strip/standardize/NFC iterated to a
// fixed point so that running the pipeline twice equals running it once.
CleanText clean(const RawRecord& record, const CleanOptions& opts = {});

// Same, starting from already-decoded text.
CleanText clean_text(std::string_view text, const CleanOptions& opts = {});

}  // namespace corpusqc::normalize

#endif  // CORPUSQC_NORMALIZE_HPP_
