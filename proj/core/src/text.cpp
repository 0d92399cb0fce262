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

#include "mmqa/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace mmqa::text {

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c) != 0;
}

char lower_ascii(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

} // namespace

std::vector<Token> tokenize(std::string_view input) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < input.size()) {
        const auto c = static_cast<unsigned char>(input[i]);
        if (is_space(c) || is_ascii_punct(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::string word;
        while (i < input.size()) {
            const auto d = static_cast<unsigned char>(input[i]);
            if (is_space(d) || is_ascii_punct(d)) break;
            word.push_back(lower_ascii(input[i]));
            ++i;
        }
        out.push_back(Token{std::move(word), start, i});
    }
    return out;
}

std::vector<std::string> words(std::string_view input) {
    std::vector<std::string> out;
    for (auto& t : tokenize(input)) out.push_back(std::move(t.text));
    return out;
}

std::string to_lower(std::string_view input) {
    std::string out(input);
    for (auto& c : out) c = lower_ascii(c);
    return out;
}

std::string trim(std::string_view input) {
    std::size_t b = 0;
    while (b < input.size() && is_space(static_cast<unsigned char>(input[b]))) ++b;
    std::size_t e = input.size();
    while (e > b && is_space(static_cast<unsigned char>(input[e - 1]))) --e;
    return std::string(input.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view input) {
    std::string out;
    bool pending = false;
    for (char c : input) {
        if (is_space(static_cast<unsigned char>(c))) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::size_t utf8_length(std::string_view input) {
    std::size_t n = 0;
    for (char c : input) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::string normalize_for_match(std::string_view input) {
    std::string stripped;
    stripped.reserve(input.size());
    for (char c : input) {
        if (is_ascii_punct(static_cast<unsigned char>(c))) continue;
        stripped.push_back(lower_ascii(c));
    }
    return collapse_whitespace(stripped);
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    const std::string n = normalize_for_match(needle);
    if (n.empty()) return false;
    const std::string h = " " + normalize_for_match(haystack) + " ";
    return h.find(" " + n + " ") != std::string::npos;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (lower_ascii(a[i]) != lower_ascii(b[i])) return false;
    }
    return true;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    if (std::isfinite(value) && std::abs(value) < 1e15 && value == std::trunc(value)) {
        std::array<char, 32> buf{};
        auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                     static_cast<long long>(value));
        return std::string(buf.data(), p);
    }
    std::array<char, 64> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), p);
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (char c : data) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex_digest(std::uint64_t value, std::size_t width) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
        value >>= 4;
    }
    return out.substr(16 - std::min<std::size_t>(width, 16));
}

} // namespace mmqa::text
