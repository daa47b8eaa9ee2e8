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

#include "corpusqc/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include "corpusqc/errors.hpp"

namespace corpusqc::uni {

bool decode_one(std::string_view bytes, std::size_t& pos, char32_t& out) {
  if (pos >= bytes.size()) return false;
  const auto b0 = static_cast<unsigned char>(bytes[pos]);
  if (b0 < 0x80) {
    out = b0;
    ++pos;
    return true;
  }
  int len;
  char32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return false;  // lone continuation or invalid lead byte
  }
  if (pos + len > bytes.size()) return false;
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(bytes[pos + i]);
    if ((b & 0xC0) != 0x80) return false;
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong encodings, surrogates and out-of-range values are invalid.
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len]) return false;
  if (cp >= 0xD800 && cp <= 0xDFFF) return false;
  if (cp > 0x10FFFF) return false;
  out = cp;
  pos += len;
  return true;
}

bool decode_utf8(std::string_view bytes, std::u32string& out,
                 std::size_t& bad_offset) {
  out.clear();
  out.reserve(bytes.size());
  std::size_t pos = 0;
  char32_t cp;
  while (pos < bytes.size()) {
    if (!decode_one(bytes, pos, cp)) {
      bad_offset = pos;
      return false;
    }
    out.push_back(cp);
  }
  return true;
}

std::u32string decode_utf8_lossy(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  char32_t cp;
  while (pos < bytes.size()) {
    if (decode_one(bytes, pos, cp)) {
      out.push_back(cp);
    } else {
      out.push_back(kReplacementChar);
      ++pos;
    }
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::size_t scalar_count(std::string_view utf8) {
  std::size_t n = 0;
  for (char c : utf8) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string to_nfc(std::string_view utf8) {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(ec);
  if (U_FAILURE(ec)) {
    throw Error(std::string("ICU NFC instance unavailable: ") +
                u_errorName(ec));
  }
  const icu::UnicodeString src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  // Fast path: already normalized (the common case once the pipeline has
  // run), skip the copy.
  if (nfc->isNormalized(src, ec) && U_SUCCESS(ec)) {
    return std::string(utf8);
  }
  ec = U_ZERO_ERROR;
  const icu::UnicodeString dst = nfc->normalize(src, ec);
  if (U_FAILURE(ec)) {
    throw Error(std::string("NFC normalization failed: ") + u_errorName(ec));
  }
  std::string out;
  dst.toUTF8String(out);
  return out;
}

bool is_space_like(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x20:
    case 0xA0:
    case 0x1680:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::u32string parse_codepoint_field(const std::string& field,
                                     const std::string& where) {
  std::u32string out;
  std::size_t i = 0;
  while (i < field.size()) {
    while (i < field.size() && (field[i] == ' ' || field[i] == '\t' ||
                                field[i] == '\r')) {
      ++i;
    }
    if (i >= field.size()) break;
    const std::size_t start = i;
    while (i < field.size() && field[i] != ' ' && field[i] != '\t' &&
           field[i] != '\r') {
      ++i;
    }
    const std::string tok = field.substr(start, i - start);
    if (tok.size() < 3 || (tok[0] != 'U' && tok[0] != 'u') || tok[1] != '+') {
      throw Error(where + ": expected U+XXXX codepoint, got '" + tok + "'");
    }
    char32_t cp = 0;
    for (std::size_t j = 2; j < tok.size(); ++j) {
      const char c = tok[j];
      int digit;
      if (c >= '0' && c <= '9') {
        digit = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        digit = c - 'a' + 10;
      } else if (c >= 'A' && c <= 'F') {
        digit = c - 'A' + 10;
      } else {
        throw Error(where + ": bad hex digit in '" + tok + "'");
      }
      cp = cp * 16 + static_cast<char32_t>(digit);
    }
    if (cp > 0x10FFFF) {
      throw Error(where + ": codepoint out of range in '" + tok + "'");
    }
    out.push_back(cp);
  }
  return out;
}

}  // namespace corpusqc::uni
