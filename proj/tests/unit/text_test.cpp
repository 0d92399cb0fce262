/*
 * Copyright 2026 The mmqa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include "mmqa/text.hpp"

namespace mmqa::text {
namespace {

TEST(Tokenize, SplitsOnWhitespaceAndPunctuation) {
    EXPECT_EQ(words("Who directed A Dangerous-Age?"),
              (std::vector<std::string>{"who", "directed", "a", "dangerous", "age"}));
}

TEST(Tokenize, KeepsByteOffsets) {
    const std::string q = "Who directed A Dangerous Age?";
    const auto tokens = tokenize(q);
    ASSERT_EQ(tokens.size(), 5U);
    EXPECT_EQ(q.substr(tokens[3].begin, tokens[3].end - tokens[3].begin), "Dangerous");
}

TEST(Tokenize, NonAsciiBytesStayInsideWords) {
    EXPECT_EQ(words("Café Müller, 1978"), (std::vector<std::string>{"café", "müller", "1978"}));
}

TEST(Tokenize, EmptyAndPunctuationOnly) {
    EXPECT_TRUE(words("").empty());
    EXPECT_TRUE(words(" ,.!? ").empty());
}

TEST(Normalize, ForMatch) {
    EXPECT_EQ(normalize_for_match("  Tell Me That You Love Me,   Junie Moon! "), "tell me that you love me junie moon");
}

TEST(Normalize, ContainsOnWordBoundaries) {
    EXPECT_TRUE(contains_normalized("The film Back to Love, released 2011.", "back to love"));
    EXPECT_FALSE(contains_normalized("Backstage to Lovely", "back to love"));
    EXPECT_FALSE(contains_normalized("anything", ""));
}

TEST(Text, Utf8Length) {
    EXPECT_EQ(utf8_length("abc"), 3U);
    EXPECT_EQ(utf8_length("Müller"), 6U);
}

TEST(Text, FormatNumber) {
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(2.5), "2.5");
    EXPECT_EQ(format_number(-1.0), "-1");
}

TEST(Text, Fnv1aKnownVectors) {
    // Published FNV-1a 64-bit test vectors.
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Text, HexDigestWidth) {
    EXPECT_EQ(hex_digest(0xabcULL, 4), "0abc");
    EXPECT_EQ(hex_digest(0xcbf29ce484222325ULL).size(), 16U);
}

TEST(Text, JoinTrimCollapse) {
    EXPECT_EQ(join({"a", "b", "c"}, ", "), "a, b, c");
    EXPECT_EQ(trim("\t x y \n"), "x y");
    EXPECT_EQ(collapse_whitespace(" x   y "), "x y");
    EXPECT_TRUE(iequals("Forest Hills", "forest HILLS"));
}

} // namespace
} // namespace mmqa::text
