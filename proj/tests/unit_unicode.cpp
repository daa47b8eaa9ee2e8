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

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "corpusqc/errors.hpp"
#include "corpusqc/unicode.hpp"
#include "test_support.hpp"

namespace uni = corpusqc::uni;

namespace {

char32_t random_scalar(std::mt19937& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, 0x10FFFF - 0x800);
  char32_t cp = pick(rng);
  if (cp >= 0xD800) cp += 0x800;  // skip the surrogate gap
  return cp;
}

}  // namespace

TEST_CASE("decode_one accepts each sequence length") {
  const struct {
    const char* bytes;
    char32_t expect;
    std::size_t len;
  } cases[] = {
      {"A", U'A', 1},
      {"\xC2\xA9", U'©', 2},
      {"\xE1\xBA\xB9", U'ẹ', 3},
      {"\xF0\x9F\x98\x80", U'\U0001F600', 4},
  };
  for (const auto& c : cases) {
    std::size_t pos = 0;
    char32_t out = 0;
    REQUIRE(uni::decode_one(c.bytes, pos, out));
    CHECK(out == c.expect);
    CHECK(pos == c.len);
  }
}

TEST_CASE("decode_one rejects malformed sequences without advancing") {
  const std::vector<std::string> bad = {
      "\x80",              // stray continuation
      "\xC0\xAF",          // overlong '/'
      "\xC1\xBF",          // overlong
      "\xE0\x80\xAF",      // overlong 3-byte
      "\xF0\x80\x80\xAF",  // overlong 4-byte
      "\xED\xA0\x80",      // surrogate U+D800
      "\xED\xBF\xBF",      // surrogate U+DFFF
      "\xF4\x90\x80\x80",  // above U+10FFFF
      "\xC2",              // truncated 2-byte
      "\xE1\xBA",          // truncated 3-byte
      "\xF0\x9F\x98",      // truncated 4-byte
      "\xFE", "\xFF",      // never-valid lead bytes
      "\xC2\x41",          // non-continuation tail
  };
  for (const auto& b : bad) {
    std::size_t pos = 0;
    char32_t out = 0;
    CAPTURE(b);
    CHECK_FALSE(uni::decode_one(b, pos, out));
    CHECK(pos == 0);
  }
}

TEST_CASE("strict decode reports the first offending offset") {
  std::u32string out;
  std::size_t bad = 0;
  CHECK(uni::decode_utf8("ok\xC3\xA9", out, bad));
  CHECK(out == U"oké");

  out.clear();
  CHECK_FALSE(uni::decode_utf8("ab\x80yz", out, bad));
  CHECK(bad == 2);

  out.clear();
  CHECK_FALSE(uni::decode_utf8("abc\xF4\x90\x80\x80", out, bad));
  CHECK(bad == 3);
}

TEST_CASE("lossy decode substitutes one replacement char per bad byte") {
  CHECK(uni::decode_utf8_lossy("\x80\x80") ==
        std::u32string{uni::kReplacementChar, uni::kReplacementChar});
  CHECK(uni::decode_utf8_lossy("a\xC3") ==
        std::u32string{U'a', uni::kReplacementChar});
  // Overlong slash must not decode to '/': both bytes are replaced.
  CHECK(uni::decode_utf8_lossy("\xC0\xAF") ==
        std::u32string{uni::kReplacementChar, uni::kReplacementChar});
  CHECK(uni::decode_utf8_lossy("ab") == U"ab");
}

TEST_CASE("encode/decode round-trips boundary scalars") {
  const char32_t edges[] = {0x0,    0x7F,    0x80,    0x7FF,    0x800,
                            0xFFFF, 0x10000, 0xE01EF, 0x10FFFF};
  for (char32_t cp : edges) {
    std::string bytes;
    uni::append_utf8(bytes, cp);
    std::size_t pos = 0;
    char32_t back = 0;
    REQUIRE(uni::decode_one(bytes, pos, back));
    CHECK(back == cp);
    CHECK(pos == bytes.size());
  }
}

TEST_CASE("encode/decode round-trips random scalar strings") {
  std::mt19937 rng(20260823);
  for (int trial = 0; trial < 2000; ++trial) {
    std::uniform_int_distribution<int> len_pick(0, 32);
    std::u32string original;
    const int len = len_pick(rng);
    for (int i = 0; i < len; ++i) original.push_back(random_scalar(rng));

    const std::string bytes = uni::encode_utf8(original);
    std::u32string strict;
    std::size_t bad = 0;
    REQUIRE(uni::decode_utf8(bytes, strict, bad));
    CHECK(strict == original);
    CHECK(uni::decode_utf8_lossy(bytes) == original);
    CHECK(uni::scalar_count(bytes) == original.size());
  }
}

TEST_CASE("nfc composes combining sequences and is idempotent") {
  CHECK(uni::to_nfc("é") == "é");
  CHECK(uni::to_nfc("ọ") == "ọ");
  CHECK(uni::to_nfc("é") == "é");
  CHECK(uni::to_nfc("plain ascii") == "plain ascii");

  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::string text = testsup::random_pathological_text(rng);
    const std::string once = uni::to_nfc(text);
    CHECK(uni::to_nfc(once) == once);
  }
}

TEST_CASE("control and space classification") {
  CHECK(uni::is_control(U''));
  CHECK(uni::is_control(U''));
  CHECK(uni::is_control(U''));
  CHECK(uni::is_control(U''));
  CHECK_FALSE(uni::is_control(U' '));
  CHECK_FALSE(uni::is_control(U' '));

  CHECK(uni::is_space_like(U' '));
  CHECK(uni::is_space_like(U'\t'));
  CHECK(uni::is_space_like(U' '));
  CHECK(uni::is_space_like(U' '));
  CHECK(uni::is_space_like(U'　'));
  CHECK_FALSE(uni::is_space_like(U'a'));
  CHECK_FALSE(uni::is_space_like(U'\n'));
}

TEST_CASE("codepoint field parser") {
  CHECK(uni::parse_codepoint_field("U+0065 U+0329", "test") ==
        std::u32string{U'e', U'̩'});
  CHECK(uni::parse_codepoint_field("U+1F600", "test") ==
        std::u32string{U'\U0001F600'});
  CHECK_THROWS_AS(uni::parse_codepoint_field("0065", "test"), corpusqc::Error);
  CHECK_THROWS_AS(uni::parse_codepoint_field("U+ZZZZ", "test"), corpusqc::Error);
  CHECK_THROWS_AS(uni::parse_codepoint_field("U+110000", "test"),
                  corpusqc::Error);
  // Emptiness is the caller's concern (rulesets reject empty sides).
  CHECK(uni::parse_codepoint_field("", "test").empty());
  CHECK(uni::parse_codepoint_field("  \t ", "test").empty());
}
