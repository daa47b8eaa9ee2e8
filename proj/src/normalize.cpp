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

#include "corpusqc/normalize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "corpusqc/unicode.hpp"

namespace corpusqc::normalize {

namespace {

// ---------------------------------------------------------------------------
// Encodings

std::string canonical_encoding_label(std::string_view label) {
  std::string out;
  for (char c : label) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Windows-1252 high range 0x80..0x9F; 0 marks the five undefined slots.
constexpr std::array<char32_t, 32> kCp1252High = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

enum class Encoding { kUtf8, kAscii, kLatin1, kCp1252 };

Encoding resolve_encoding(const std::optional<std::string>& declared) {
  if (!declared || declared->empty()) return Encoding::kUtf8;
  const std::string label = canonical_encoding_label(*declared);
  if (label == "utf8") return Encoding::kUtf8;
  if (label == "ascii" || label == "usascii") return Encoding::kAscii;
  if (label == "latin1" || label == "iso88591" || label == "cp819")
    return Encoding::kLatin1;
  if (label == "windows1252" || label == "cp1252") return Encoding::kCp1252;
  throw UnknownEncoding(*declared);
}

std::string decode_single_byte(std::string_view bytes, Encoding enc,
                               DecodePolicy policy) {
  std::string out;
  out.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const auto b = static_cast<unsigned char>(bytes[i]);
    char32_t cp = 0;
    bool ok = true;
    switch (enc) {
      case Encoding::kAscii:
        ok = b < 0x80;
        cp = b;
        break;
      case Encoding::kLatin1:
        cp = b;
        break;
      case Encoding::kCp1252:
        if (b >= 0x80 && b <= 0x9F) {
          cp = kCp1252High[b - 0x80];
          ok = cp != 0;
        } else {
          cp = b;
        }
        break;
      case Encoding::kUtf8:
        break;  // handled elsewhere
    }
    if (!ok) {
      if (policy == DecodePolicy::kStrict) {
        throw DecodeError(i, "undecodable byte at offset " +
                                 std::to_string(i));
      }
      cp = uni::kReplacementChar;
    }
    uni::append_utf8(out, cp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markup stripping

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

// Core + Latin-1 + common typography entities, sorted by name for
// binary search. Unknown names pass through verbatim.
constexpr NamedEntity kEntities[] = {
    {"AElig", 0xC6},   {"Aacute", 0xC1},  {"Acirc", 0xC2},
    {"Agrave", 0xC0},  {"Aring", 0xC5},   {"Atilde", 0xC3},
    {"Auml", 0xC4},    {"Ccedil", 0xC7},  {"Dagger", 0x2021},
    {"ETH", 0xD0},     {"Eacute", 0xC9},  {"Ecirc", 0xCA},
    {"Egrave", 0xC8},  {"Euml", 0xCB},    {"Iacute", 0xCD},
    {"Icirc", 0xCE},   {"Igrave", 0xCC},  {"Iuml", 0xCF},
    {"Ntilde", 0xD1},  {"OElig", 0x152},  {"Oacute", 0xD3},
    {"Ocirc", 0xD4},   {"Ograve", 0xD2},  {"Oslash", 0xD8},
    {"Otilde", 0xD5},  {"Ouml", 0xD6},    {"Prime", 0x2033},
    {"Scaron", 0x160}, {"THORN", 0xDE},   {"Uacute", 0xDA},
    {"Ucirc", 0xDB},   {"Ugrave", 0xD9},  {"Uuml", 0xDC},
    {"Yacute", 0xDD},  {"Yuml", 0x178},   {"aacute", 0xE1},
    {"acirc", 0xE2},   {"acute", 0xB4},   {"aelig", 0xE6},
    {"agrave", 0xE0},  {"amp", 0x26},     {"apos", 0x27},
    {"aring", 0xE5},   {"atilde", 0xE3},  {"auml", 0xE4},
    {"bdquo", 0x201E}, {"brvbar", 0xA6},  {"bull", 0x2022},
    {"ccedil", 0xE7},  {"cedil", 0xB8},   {"cent", 0xA2},
    {"copy", 0xA9},    {"curren", 0xA4},  {"dagger", 0x2020},
    {"deg", 0xB0},     {"divide", 0xF7},  {"eacute", 0xE9},
    {"ecirc", 0xEA},   {"egrave", 0xE8},  {"eth", 0xF0},
    {"euml", 0xEB},    {"euro", 0x20AC},  {"frac12", 0xBD},
    {"frac14", 0xBC},  {"frac34", 0xBE},  {"frasl", 0x2044},
    {"gt", 0x3E},      {"hellip", 0x2026},{"iacute", 0xED},
    {"icirc", 0xEE},   {"iexcl", 0xA1},   {"igrave", 0xEC},
    {"iquest", 0xBF},  {"iuml", 0xEF},    {"laquo", 0xAB},
    {"ldquo", 0x201C}, {"lsaquo", 0x2039},{"lsquo", 0x2018},
    {"lt", 0x3C},      {"macr", 0xAF},    {"mdash", 0x2014},
    {"micro", 0xB5},   {"middot", 0xB7},  {"minus", 0x2212},
    {"nbsp", 0xA0},    {"ndash", 0x2013}, {"not", 0xAC},
    {"ntilde", 0xF1},  {"oacute", 0xF3},  {"ocirc", 0xF4},
    {"oelig", 0x153},  {"ograve", 0xF2},  {"ordf", 0xAA},
    {"ordm", 0xBA},    {"oslash", 0xF8},  {"otilde", 0xF5},
    {"ouml", 0xF6},    {"para", 0xB6},    {"permil", 0x2030},
    {"plusmn", 0xB1},  {"pound", 0xA3},   {"prime", 0x2032},
    {"quot", 0x22},    {"raquo", 0xBB},   {"rdquo", 0x201D},
    {"reg", 0xAE},     {"rsaquo", 0x203A},{"rsquo", 0x2019},
    {"sbquo", 0x201A}, {"scaron", 0x161}, {"sect", 0xA7},
    {"shy", 0xAD},     {"sup1", 0xB9},    {"sup2", 0xB2},
    {"sup3", 0xB3},    {"szlig", 0xDF},   {"thorn", 0xFE},
    {"tilde", 0x2DC},  {"times", 0xD7},   {"trade", 0x2122},
    {"uacute", 0xFA},  {"ucirc", 0xFB},   {"ugrave", 0xF9},
    {"uml", 0xA8},     {"uuml", 0xFC},    {"yacute", 0xFD},
    {"yen", 0xA5},     {"yuml", 0xFF}};

bool lookup_entity(std::string_view name, char32_t& cp) {
  const auto* it = std::lower_bound(
      std::begin(kEntities), std::end(kEntities), name,
      [](const NamedEntity& e, std::string_view n) { return e.name < n; });
  if (it != std::end(kEntities) && it->name == name) {
    cp = it->cp;
    return true;
  }
  return false;
}

constexpr std::size_t kMaxTagSpan = 1024;    // scalars searched for '>'
constexpr std::size_t kMaxEntityName = 32;

std::u32string remove_tags(const std::u32string& text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == U'<') {
      const std::size_t limit = std::min(text.size(), i + 1 + kMaxTagSpan);
      std::size_t close = i + 1;
      while (close < limit && text[close] != U'>') ++close;
      if (close < limit && text[close] == U'>') {
        i = close + 1;  // drop the whole span
        continue;
      }
      // No closing '>' in range: literal text.
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

bool is_entity_name_char(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
         (cp >= U'0' && cp <= U'9');
}

// Single left-to-right pass; the caller iterates to a fixed point.
std::u32string decode_entities(const std::u32string& text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != U'&') {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    // Find a ';' within the maximal entity length.
    std::size_t j = i + 1;
    bool numeric = j < text.size() && text[j] == U'#';
    std::size_t name_begin = numeric ? j + 1 : j;
    std::size_t k = name_begin;
    const std::size_t limit =
        std::min(text.size(), name_begin + kMaxEntityName);
    while (k < limit && text[k] != U';') ++k;
    if (k >= text.size() || k >= limit || text[k] != U';' ||
        k == name_begin) {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    char32_t decoded = 0;
    bool ok = false;
    if (numeric) {
      std::uint64_t value = 0;
      bool hex = text[name_begin] == U'x' || text[name_begin] == U'X';
      std::size_t d = hex ? name_begin + 1 : name_begin;
      ok = d < k;
      for (; d < k && ok; ++d) {
        const char32_t c = text[d];
        int digit;
        if (c >= U'0' && c <= U'9') {
          digit = static_cast<int>(c - U'0');
        } else if (hex && c >= U'a' && c <= U'f') {
          digit = static_cast<int>(c - U'a') + 10;
        } else if (hex && c >= U'A' && c <= U'F') {
          digit = static_cast<int>(c - U'A') + 10;
        } else {
          ok = false;
          break;
        }
        value = value * (hex ? 16 : 10) + static_cast<std::uint64_t>(digit);
        if (value > 0x10FFFF) value = 0x110000;  // clamp, flagged below
      }
      if (ok) {
        // Out-of-range and surrogate escapes decode to U+FFFD.
        if (value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
          decoded = uni::kReplacementChar;
        } else {
          decoded = static_cast<char32_t>(value);
        }
      }
    } else {
      std::string name;
      ok = true;
      for (std::size_t d = name_begin; d < k; ++d) {
        if (!is_entity_name_char(text[d])) {
          ok = false;
          break;
        }
        name.push_back(static_cast<char>(text[d]));
      }
      ok = ok && lookup_entity(name, decoded);
    }
    if (ok) {
      out.push_back(decoded);
      i = k + 1;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symbol standardization

// Quote/dash/ellipsis canonicalization shipped with the toolkit. The
// same table lives in data/symbol_map.tsv for external editing.
constexpr const char* kBuiltinSymbolMap = R"(# curly single quotes -> apostrophe
U+2018	U+0027
U+2019	U+0027
U+201A	U+0027
U+201B	U+0027
U+2039	U+0027
U+203A	U+0027
U+00B4	U+0027
# curly double quotes and guillemets -> straight double quote
U+201C	U+0022
U+201D	U+0022
U+201E	U+0022
U+201F	U+0022
U+00AB	U+0022
U+00BB	U+0022
# dashes and minus -> hyphen-minus
U+2010	U+002D
U+2011	U+002D
U+2012	U+002D
U+2013	U+002D
U+2014	U+002D
U+2015	U+002D
U+2212	U+002D
# ellipsis -> three dots
U+2026	U+002E U+002E U+002E
)";

}  // namespace

const SymbolMap& SymbolMap::builtin() {
  static const SymbolMap instance = [] {
    std::istringstream in(kBuiltinSymbolMap);
    return parse(in, "<builtin symbol map>");
  }();
  return instance;
}

SymbolMap SymbolMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open symbol map: " + path.string());
  return parse(in, path.string());
}

SymbolMap SymbolMap::parse(std::istream& in, const std::string& name) {
  SymbolMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tab = line.find('\t');
    const std::string where = name + ":" + std::to_string(line_no);
    if (tab == std::string::npos) {
      throw Error(where + ": expected two tab-separated columns");
    }
    std::u32string lhs = uni::parse_codepoint_field(line.substr(0, tab), where);
    std::u32string rhs = uni::parse_codepoint_field(line.substr(tab + 1), where);
    if (lhs.empty()) throw Error(where + ": empty mapping source");
    map.entries_.emplace_back(std::move(lhs), std::move(rhs));
  }
  map.finalize(name);
  return map;
}

void SymbolMap::finalize(const std::string& name) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.size() > b.first.size();
                   });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < entries_.size(); ++j) {
      if (entries_[i].first == entries_[j].first) {
        throw Error(name + ": duplicate mapping source");
      }
    }
  }
  // The table must be stable under itself or standardize_symbols would
  // not be idempotent.
  for (const auto& [lhs, rhs] : entries_) {
    for (std::size_t pos = 0; pos < rhs.size(); ++pos) {
      const std::u32string* ignored;
      if (match(rhs, pos, &ignored) != 0) {
        throw Error(name + ": mapping target contains a mapping source");
      }
    }
  }
}

std::size_t SymbolMap::match(std::u32string_view text, std::size_t pos,
                             const std::u32string** rhs) const {
  for (const auto& [lhs, target] : entries_) {
    if (lhs.size() <= text.size() - pos &&
        text.compare(pos, lhs.size(), lhs) == 0) {
      *rhs = &target;
      return lhs.size();
    }
  }
  return 0;
}

std::string decode_bytes(const RawRecord& record, DecodePolicy policy) {
  const Encoding enc = resolve_encoding(record.declared_encoding);
  if (record.bytes.empty()) return {};
  if (enc != Encoding::kUtf8) {
    return decode_single_byte(record.bytes, enc, policy);
  }
  if (policy == DecodePolicy::kStrict) {
    std::u32string scalars;
    std::size_t bad_offset = 0;
    if (!uni::decode_utf8(record.bytes, scalars, bad_offset)) {
      throw DecodeError(bad_offset, "invalid UTF-8 at offset " +
                                        std::to_string(bad_offset));
    }
    return record.bytes;
  }
  return uni::encode_utf8(uni::decode_utf8_lossy(record.bytes));
}

std::string normalize_unicode(std::string_view text) {
  return uni::to_nfc(text);
}

std::string strip_markup(std::string_view text) {
  std::u32string cur = uni::decode_utf8_lossy(text);
  // Tag removal and entity decoding can expose further markup (entity
  // fragments glued together, escaped tags); iterate until stable so a
  // second call is a no-op. Every productive round shrinks the text, so
  // this terminates.
  const std::size_t cap = cur.size() + 2;
  for (std::size_t round = 0; round < cap; ++round) {
    std::u32string next = decode_entities(remove_tags(cur));
    if (next == cur) break;
    cur = std::move(next);
  }
  return uni::encode_utf8(cur);
}

std::string standardize_symbols(std::string_view text, const SymbolMap& map) {
  const std::u32string in = uni::decode_utf8_lossy(text);
  std::u32string mapped;
  mapped.reserve(in.size());
  for (std::size_t i = 0; i < in.size();) {
    const std::u32string* rhs;
    const std::size_t len = map.match(in, i, &rhs);
    if (len > 0) {
      mapped.append(*rhs);
      i += len;
    } else {
      mapped.push_back(in[i]);
      ++i;
    }
  }
  std::u32string out;
  out.reserve(mapped.size());
  bool pending_space = false;
  for (char32_t cp : mapped) {
    if (cp == U'\n') {
      // Newline survives; a pending space still materializes before it.
      if (pending_space && !out.empty()) out.push_back(U' ');
      pending_space = false;
      out.push_back(cp);
    } else if (uni::is_space_like(cp)) {
      pending_space = true;
    } else if (uni::is_control(cp)) {
      continue;
    } else {
      if (pending_space && !out.empty()) out.push_back(U' ');
      pending_space = false;
      out.push_back(cp);
    }
  }
  // Trim trailing whitespace (leading was handled by the !out.empty()
  // guards above; newlines at the edges go too).
  while (!out.empty() && (out.back() == U' ' || out.back() == U'\n')) {
    out.pop_back();
  }
  std::size_t begin = 0;
  while (begin < out.size() && (out[begin] == U' ' || out[begin] == U'\n')) {
    ++begin;
  }
  return uni::encode_utf8(std::u32string_view(out).substr(begin));
}

CleanText clean_text(std::string_view text, const CleanOptions& opts) {
  CleanText result;
  const SymbolMap& map =
      opts.symbol_map ? *opts.symbol_map : SymbolMap::builtin();
  std::string cur(text);
  // strip_markup can surface entities that only assemble after control
  // characters are removed, so the tier iterates to a fixed point; this
  // is what makes the composed pipeline idempotent end to end.
  for (int round = 0; round < 16; ++round) {
    std::string next = cur;
    if (opts.strip_markup) next = strip_markup(next);
    if (opts.standardize_symbols) next = standardize_symbols(next, map);
    if (opts.normalize_unicode) next = normalize_unicode(next);
    if (next == cur) break;
    cur = std::move(next);
  }
  result.text = std::move(cur);
  if (opts.strip_markup) result.applied_steps.emplace_back("strip_markup");
  if (opts.standardize_symbols)
    result.applied_steps.emplace_back("standardize_symbols");
  if (opts.normalize_unicode)
    result.applied_steps.emplace_back("normalize_unicode");
  return result;
}

CleanText clean(const RawRecord& record, const CleanOptions& opts) {
  CleanText result = clean_text(decode_bytes(record, opts.decode_policy), opts);
  result.applied_steps.insert(result.applied_steps.begin(), "decode");
  return result;
}

}  // namespace corpusqc::normalize
