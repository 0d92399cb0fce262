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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mmqa::text {

struct Token {
    std::string text;   // lowercased surface
    std::size_t begin;  // byte offset into the source
    std::size_t end;    // one past the last byte
};

// Splits on whitespace and ASCII punctuation. Bytes >= 0x80 (UTF-8 sequences)
// are treated as word characters so non-ASCII words stay whole. Punctuation is
// dropped. Token text is ASCII-lowercased.
std::vector<Token> tokenize(std::string_view input);

// Token texts only.
std::vector<std::string> words(std::string_view input);

std::string to_lower(std::string_view input);
std::string trim(std::string_view input);
std::string collapse_whitespace(std::string_view input);

// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view input);

// Lowercase, delete ASCII punctuation, collapse whitespace.
std::string normalize_for_match(std::string_view input);

// normalize_for_match(needle) occurs in normalize_for_match(haystack) on
// whole-word boundaries.
bool contains_normalized(std::string_view haystack, std::string_view needle);

bool iequals(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Shortest round-trip decimal rendering; integral values print without a
// fractional part ("3", "2.5", "-1").
std::string format_number(double value);

// FNV-1a, used for stable identifiers and config hashes.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex_digest(std::uint64_t value, std::size_t width = 16);

} // namespace mmqa::text
