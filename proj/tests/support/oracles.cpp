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


#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

namespace oracle {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(b, e - b + 1);
}

std::optional<int> month_number(std::string word) {
    static const char* names[] = {"january", "february", "march",     "april",   "may",      "june",
                                  "july",    "august",   "september", "october", "november", "december"};
    for (auto& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (word == "sept") return 9;
    for (int i = 0; i < 12; ++i) {
        const std::string full = names[i];
        if (word == full || word == full.substr(0, 3)) return i + 1;
    }
    return std::nullopt;
}

bool leap(long long y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

std::optional<long long> days_of(long long y, int m, int d) {
    static const int len[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return std::nullopt;
    if (d > len[m - 1] + (m == 2 && leap(y) ? 1 : 0)) return std::nullopt;
    // Count days from a fixed origin by summing whole years and months.
    long long total = 0;
    for (long long yy = 1; yy < y; ++yy) total += leap(yy) ? 366 : 365;
    for (int mm = 1; mm < m; ++mm) total += len[mm - 1] + (mm == 2 && leap(y) ? 1 : 0);
    return total + d;
}

std::optional<std::size_t> unique_row(const mmqa::Table& table, const mmqa::AnswerList& a) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        bool hit = false;
        for (const auto& cell : table.rows[r]) {
            if (a.entity_titles) {
                hit = hit || std::find(cell.links.begin(), cell.links.end(), a.entity_titles->front()) != cell.links.end();
            } else {
                hit = hit || squeeze(cell.text) == squeeze(a.values.front());
            }
        }
        if (hit) rows.push_back(r);
    }
    if (rows.size() != 1) return std::nullopt;
    return rows.front();
}

std::string title_key(const mmqa::AnswerList& a, std::size_t i) {
    return squeeze(a.entity_titles ? (*a.entity_titles)[i] : a.values[i]);
}

std::vector<std::string> answer_tokens(const std::string& s) {
    std::string cleaned;
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::ispunct(c)) continue;
        cleaned.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
    std::istringstream in(cleaned);
    std::vector<std::string> out;
    for (std::string w; in >> w;) {
        if (w != "a" && w != "an" && w != "the") out.push_back(w);
    }
    return out;
}

} // namespace

std::string squeeze(const std::string& s) {
    std::string out;
    bool gap = false;
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::ispunct(c)) continue;
        if (c < 0x80 && std::isspace(c)) {
            gap = !out.empty();
            continue;
        }
        if (gap) out.push_back(' ');
        gap = false;
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    }
    return out;
}

std::optional<long long> date_days(const std::string& cell) {
    static const std::regex year(R"(^(\d{4})$)");
    static const std::regex iso(R"(^(\d{4})-(\d{2})-(\d{2})$)");
    static const std::regex mdy(R"(^([A-Za-z]+)\s+(\d{1,2}),?\s+(\d{4})$)");
    static const std::regex dmy(R"(^(\d{1,2})\s+([A-Za-z]+)\s+(\d{4})$)");
    const std::string t = strip(cell);
    std::smatch m;
    if (std::regex_match(t, m, year)) return days_of(std::stoll(m[1]), 1, 1);
    if (std::regex_match(t, m, iso)) return days_of(std::stoll(m[1]), std::stoi(m[2]), std::stoi(m[3]));
    if (std::regex_match(t, m, mdy)) {
        auto month = month_number(m[1]);
        if (!month) return std::nullopt;
        return days_of(std::stoll(m[3]), *month, std::stoi(m[2]));
    }
    if (std::regex_match(t, m, dmy)) {
        auto month = month_number(m[2]);
        if (!month) return std::nullopt;
        return days_of(std::stoll(m[3]), *month, std::stoi(m[1]));
    }
    return std::nullopt;
}

std::optional<double> number(const std::string& cell) {
    static const std::regex re(R"(^([+-]?)(?:\$|€|£|¥)?(-?)(\d{1,3}(?:,\d{3})+|\d+)(\.\d+)?$)");
    const std::string t = strip(cell);
    std::smatch m;
    if (!std::regex_match(t, m, re)) return std::nullopt;
    if (m[1] == "-" && m[2] == "-") return std::nullopt;
    std::string digits = m[3];
    digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
    const double v = std::stod(digits + std::string(m[4]));
    return (m[1] == "-" || m[2] == "-") ? -v : v;
}

std::optional<double> sort_key(mmqa::SemanticType type, const std::string& cell) {
    switch (type) {
    case mmqa::SemanticType::date:
        if (auto d = date_days(cell)) return static_cast<double>(*d);
        return std::nullopt;
    case mmqa::SemanticType::numeric:
    case mmqa::SemanticType::index:
        return number(cell);
    case mmqa::SemanticType::text:
        return std::nullopt;
    }
    return std::nullopt;
}

mmqa::SemanticType label_column(const std::vector<std::string>& cells) {
    static const std::regex bare_year(R"(^\d{4}$)");
    std::vector<std::string> values;
    for (const auto& c : cells) {
        if (!strip(c).empty()) values.push_back(strip(c));
    }
    if (values.empty()) return mmqa::SemanticType::text;
    const bool dates = std::all_of(values.begin(), values.end(), [](const auto& v) { return date_days(v).has_value(); });
    const bool years = std::all_of(values.begin(), values.end(), [](const auto& v) { return std::regex_match(v, bare_year); });
    if (dates && !years) return mmqa::SemanticType::date;
    std::vector<double> nums;
    for (const auto& v : values) {
        auto n = number(v);
        if (!n) return mmqa::SemanticType::text;
        nums.push_back(*n);
    }
    for (std::size_t i = 0; i < nums.size(); ++i) {
        if (nums[i] != nums[0] + static_cast<double>(i) || nums[i] != static_cast<double>(static_cast<long long>(nums[i]))) {
            return mmqa::SemanticType::numeric;
        }
    }
    return mmqa::SemanticType::index;
}

std::vector<std::size_t> predicate_rows(const mmqa::Table& table, const mmqa::TablePredicate& p) {
    std::vector<std::size_t> candidates;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (p.condition_column && p.condition_value &&
            squeeze(table.rows[r][*p.condition_column].text) != squeeze(*p.condition_value)) {
            continue;
        }
        candidates.push_back(r);
    }
    std::vector<std::size_t> out;
    if (!p.superlative) {
        for (auto r : candidates) {
            if (!strip(table.rows[r][p.target_column].text).empty()) out.push_back(r);
        }
        return out;
    }
    const auto type = table.columns[p.target_column].semantic_type;
    // A row is selected when no other candidate beats it.
    for (auto r : candidates) {
        auto k = sort_key(type, table.rows[r][p.target_column].text);
        if (!k) continue;
        bool beaten = false;
        for (auto s : candidates) {
            auto other = sort_key(type, table.rows[s][p.target_column].text);
            if (!other) continue;
            if (*p.superlative == mmqa::Extremum::max ? *other > *k : *other < *k) beaten = true;
        }
        if (!beaten) out.push_back(r);
    }
    return out;
}

mmqa::AnswerList predicate_answers(const mmqa::Table& table, const mmqa::TablePredicate& p) {
    mmqa::AnswerList out;
    std::vector<std::string> titles;
    for (auto r : predicate_rows(table, p)) {
        const auto& cell = table.rows[r][p.target_column];
        out.values.push_back(cell.text);
        if (cell.links.size() == 1) titles.push_back(cell.links.front());
    }
    if (!out.values.empty() && titles.size() == out.values.size()) out.entity_titles = titles;
    return out;
}

std::optional<Outcome> run(const mmqa::Program& program, const mmqa::Table& table) {
    using mmqa::Operation;
    if (program.op == Operation::atomic) {
        if (!program.atomic) return std::nullopt;
        const auto& q = *program.atomic;
        if (q.modality == mmqa::Modality::table && q.predicate) return Outcome{predicate_answers(table, *q.predicate), {}};
        return Outcome{q.answers, {}};
    }
    if (program.children.size() != 2) return std::nullopt;
    const auto& first = program.children[0];
    const auto& second = program.children[1];
    if (program.op == Operation::compose) {
        if (!first.atomic || first.atomic->mentions.size() != 1) return std::nullopt;
        auto inner = run(second, table);
        if (!inner || inner->answers.values.size() != 1 || !inner->answers.entity_titles) return std::nullopt;
        if (squeeze(inner->answers.entity_titles->front()) != squeeze(first.atomic->mentions.front().title)) {
            return std::nullopt;
        }
        auto outer = run(first, table);
        if (!outer) return std::nullopt;
        return Outcome{outer->answers, inner->answers};
    }
    auto left = run(first, table);
    auto right = run(second, table);
    if (!left || !right) return std::nullopt;
    if (program.op == Operation::intersect) {
        for (const auto* side : {&left->answers, &right->answers}) {
            if (!side->entity_titles || side->values.size() < 2) return std::nullopt;
        }
        std::set<std::string> keep, seen;
        for (std::size_t i = 0; i < right->answers.values.size(); ++i) keep.insert(title_key(right->answers, i));
        mmqa::AnswerList out{{}, std::vector<std::string>{}};
        for (std::size_t i = 0; i < left->answers.values.size(); ++i) {
            const auto key = title_key(left->answers, i);
            if (keep.count(key) && seen.insert(key).second) {
                out.values.push_back(left->answers.values[i]);
                out.entity_titles->push_back((*left->answers.entity_titles)[i]);
            }
        }
        if (out.values.empty()) return std::nullopt;
        return Outcome{out, left->answers};
    }
    if (program.op == Operation::compare) {
        if (!program.compare_column || !program.compare_op) return std::nullopt;
        const auto col = *program.compare_column;
        if (col >= table.columns.size()) return std::nullopt;
        const auto type = table.columns[col].semantic_type;
        if (type != mmqa::SemanticType::date && type != mmqa::SemanticType::numeric) return std::nullopt;
        double keys[2];
        const mmqa::AnswerList* sides[2] = {&left->answers, &right->answers};
        for (int s = 0; s < 2; ++s) {
            if (sides[s]->values.size() != 1 || !sides[s]->entity_titles) return std::nullopt;
            auto row = unique_row(table, *sides[s]);
            if (!row) return std::nullopt;
            auto k = sort_key(type, table.rows[*row][col].text);
            if (!k) return std::nullopt;
            keys[s] = *k;
        }
        if (keys[0] == keys[1]) return std::nullopt;
        const bool left_wins = *program.compare_op == mmqa::Extremum::max ? keys[0] > keys[1] : keys[0] < keys[1];
        mmqa::AnswerList both = left->answers;
        both.values.push_back(right->answers.values.front());
        both.entity_titles->push_back(right->answers.entity_titles->front());
        return Outcome{left_wins ? left->answers : right->answers, both};
    }
    return std::nullopt;
}

double pair_f1(const std::string& gold, const std::string& pred) {
    const auto g = answer_tokens(gold);
    const auto p = answer_tokens(pred);
    if (g.empty() && p.empty()) return 1.0;
    if (g.empty() || p.empty()) return 0.0;
    std::map<std::string, int> counts;
    for (const auto& w : g) ++counts[w];
    int common = 0;
    for (const auto& w : p) {
        if (counts[w] > 0) {
            --counts[w];
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(p.size());
    const double recall = static_cast<double>(common) / static_cast<double>(g.size());
    return 2 * precision * recall / (precision + recall);
}

double brute_list_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
    const std::size_t n = std::max(gold.size(), pred.size());
    if (n == 0) return 1.0;
    std::vector<std::string> g = gold, p = pred;
    g.resize(n);
    p.resize(n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) total += pair_f1(g[i], p[perm[i]]);
        best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(n);
}

bool multiset_em(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
    auto canon = [](const std::vector<std::string>& xs) {
        std::vector<std::string> out;
        for (const auto& x : xs) {
            std::string joined;
            for (const auto& w : answer_tokens(x)) joined += w + " ";
            out.push_back(joined);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    return canon(gold) == canon(pred);
}

} // namespace oracle
