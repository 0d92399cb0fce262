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

#include "mmqa/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

std::string normalize_answer(std::string_view input) {
    std::string stripped;
    stripped.reserve(input.size());
    for (char ch : input) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && std::ispunct(c)) continue;
        stripped.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
    }
    std::istringstream words(stripped);
    std::string w, out;
    while (words >> w) {
        if (w == "a" || w == "an" || w == "the") continue;
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

namespace {

std::vector<std::string> answer_tokens(std::string_view s) {
    std::istringstream in(normalize_answer(s));
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

} // namespace

double pair_f1(std::string_view gold, std::string_view pred) {
    auto g = answer_tokens(gold);
    auto p = answer_tokens(pred);
    if (g.empty() && p.empty()) return 1.0;
    if (g.empty() || p.empty()) return 0.0;
    std::map<std::string, int> counts;
    for (const auto& t : g) ++counts[t];
    int common = 0;
    for (const auto& t : p) {
        if (auto it = counts.find(t); it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double precision = static_cast<double>(common) / static_cast<double>(p.size());
    const double recall = static_cast<double>(common) / static_cast<double>(g.size());
    return 2 * precision * recall / (precision + recall);
}

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& w) {
    // Hungarian algorithm (potentials form) minimizing the negated weights.
    const std::size_t n = w.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = -w[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] != 0) assignment[p[j] - 1] = j - 1;
    }
    return assignment;
}

ListScore list_em_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
    const std::size_t n = std::max(gold.size(), pred.size());
    if (n == 0) return {1.0, 1.0};
    std::vector<std::vector<double>> w(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w[i][j] = pair_f1(i < gold.size() ? gold[i] : std::string(), j < pred.size() ? pred[j] : std::string());
        }
    }
    const auto assignment = max_weight_assignment(w);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) total += w[i][assignment[i]];

    std::multiset<std::string> g, p;
    for (const auto& s : gold) g.insert(normalize_answer(s));
    for (const auto& s : pred) p.insert(normalize_answer(s));
    const double em = g == p ? 1.0 : 0.0;
    return {em, em == 1.0 ? 1.0 : std::min(1.0, total / static_cast<double>(n))};
}

// ---- Predictions -----------------------------------------------------------

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open predictions " + path.string());
    std::vector<Prediction> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            Prediction p{j.at("qid").get<std::string>(), j.at("answers").get<std::vector<std::string>>()};
            if (!seen.insert(p.qid).second) throw ValidationError("duplicate prediction for qid '" + p.qid + "'");
            out.push_back(std::move(p));
        } catch (const json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& p : predictions) out << json{{"qid", p.qid}, {"answers", p.answers}}.dump() << '\n';
}

// ---- Evaluation ------------------------------------------------------------

EvalReport evaluate(const std::vector<Example>& dataset, const std::vector<Prediction>& predictions) {
    std::map<std::string, const Example*> by_qid;
    for (const auto& e : dataset) by_qid[e.qid] = &e;
    std::map<std::string, const Prediction*> preds;
    for (const auto& p : predictions) {
        if (!by_qid.count(p.qid)) throw ValidationError("prediction for unknown qid '" + p.qid + "'");
        if (!preds.emplace(p.qid, &p).second) throw ValidationError("duplicate prediction for qid '" + p.qid + "'");
    }

    EvalReport report;
    double em[2] = {0, 0}, f1[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (const auto& e : dataset) {
        ExampleScore s;
        s.qid = e.qid;
        s.multimodal = e.multimodal;
        if (auto it = preds.find(e.qid); it != preds.end()) {
            const auto score = list_em_f1(e.answers.values, it->second->answers);
            s.em = score.em;
            s.f1 = score.f1;
        } else {
            s.missing = true;
            ++report.missing;
        }
        const int b = e.multimodal ? 1 : 0;
        em[b] += s.em;
        f1[b] += s.f1;
        ++count[b];
        report.examples.push_back(std::move(s));
    }
    auto bucket = [](double e, double f, std::size_t c) {
        return c == 0 ? BucketScore{0, 0, 0} : BucketScore{e / static_cast<double>(c), f / static_cast<double>(c), c};
    };
    report.single_modality = bucket(em[0], f1[0], count[0]);
    report.multi_modality = bucket(em[1], f1[1], count[1]);
    report.all = bucket(em[0] + em[1], f1[0] + f1[1], count[0] + count[1]);
    return report;
}

json report_to_json(const EvalReport& r) {
    auto b = [](const BucketScore& s) { return json{{"em", s.em}, {"f1", s.f1}, {"count", s.count}}; };
    json per = json::array();
    for (const auto& s : r.examples) {
        per.push_back(json{{"qid", s.qid}, {"em", s.em}, {"f1", s.f1}, {"multimodal", s.multimodal}, {"missing", s.missing}});
    }
    return json{{"aggregates",
                 {{"single_modality", b(r.single_modality)}, {"multi_modality", b(r.multi_modality)}, {"all", b(r.all)}}},
                {"missing", r.missing},
                {"examples", std::move(per)}};
}

std::string format_report(const EvalReport& r) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1);
    out << std::left << std::setw(18) << "bucket" << std::right << std::setw(8) << "count" << std::setw(8) << "EM"
        << std::setw(8) << "F1" << '\n';
    auto row = [&](const char* name, const BucketScore& s) {
        out << std::left << std::setw(18) << name << std::right << std::setw(8) << s.count << std::setw(8)
            << 100 * s.em << std::setw(8) << 100 * s.f1 << '\n';
    };
    row("single-modality", r.single_modality);
    row("multi-modality", r.multi_modality);
    row("all", r.all);
    if (r.missing) out << r.missing << " example(s) had no prediction\n";
    return out.str();
}

// ---- Audits ----------------------------------------------------------------

std::string_view to_string(AuditKind kind) {
    return kind == AuditKind::weak_distractors ? "weak_distractors" : "redundant_evidence";
}

std::string_view to_string(AnswerClass cls) {
    switch (cls) {
    case AnswerClass::year: return "year";
    case AnswerClass::date: return "date";
    case AnswerClass::number: return "number";
    }
    return "number";
}

std::optional<AnswerClass> classify_answer(std::string_view answer) {
    const std::string a = text::trim(answer);
    if (is_bare_year(a)) return AnswerClass::year;
    if (parse_date(a)) return AnswerClass::date;
    if (parse_number(a)) return AnswerClass::number;
    return std::nullopt;
}

namespace {

void collect_instances(const std::string& s, AnswerClass cls, std::set<std::string>& out) {
    static const std::regex year_re(R"((^|[^0-9])([0-9]{4})(?![0-9]))");
    static const std::regex number_re(R"([$€£¥]?[0-9][0-9,]*(\.[0-9]+)?)");
    static const std::regex date_re(
        R"(([0-9]{4}-[0-9]{2}-[0-9]{2})|([A-Za-z]+\.? [0-9]{1,2}, [0-9]{4})|([0-9]{1,2} [A-Za-z]+\.? [0-9]{4}))");
    switch (cls) {
    case AnswerClass::year:
        for (std::sregex_iterator it(s.begin(), s.end(), year_re), end; it != end; ++it) out.insert((*it)[2].str());
        break;
    case AnswerClass::number:
        for (std::sregex_iterator it(s.begin(), s.end(), number_re), end; it != end; ++it) {
            std::string m = it->str();
            while (!m.empty() && m.back() == ',') m.pop_back();
            if (auto v = parse_number(m)) out.insert(text::format_number(*v));
        }
        break;
    case AnswerClass::date:
        for (std::sregex_iterator it(s.begin(), s.end(), date_re), end; it != end; ++it) {
            if (auto d = parse_date(it->str()); d && !is_bare_year(it->str())) {
                out.insert(std::to_string(d->year) + "-" + std::to_string(d->month) + "-" + std::to_string(d->day));
            }
        }
        break;
    }
}

} // namespace

std::set<std::string> typed_instances(const AssembledContext& context, AnswerClass cls) {
    std::set<std::string> out;
    for (const auto& row : context.table.rows) {
        for (const auto& cell : row) collect_instances(cell.text, cls, out);
    }
    for (const auto& p : context.paragraphs) collect_instances(p.text, cls, out);
    return out;
}

std::optional<AuditFlag> detect_weak_distractors(const Example& e) {
    std::optional<AnswerClass> cls;
    for (const auto& a : e.answers.values) {
        auto c = classify_answer(a);
        if (!c || (cls && *cls != *c)) return std::nullopt;
        cls = c;
    }
    if (!cls) return std::nullopt;
    const auto instances = typed_instances(e.context, *cls);
    if (instances.size() != 1) return std::nullopt;
    return AuditFlag{e.qid, AuditKind::weak_distractors,
                     "the context holds a single " + std::string(to_string(*cls)) + " (" + *instances.begin() + ")"};
}

namespace {

std::set<std::string> keys_of(const AnswerList& a) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.insert(normalize_answer(a.entity_titles ? (*a.entity_titles)[i] : a.values[i]));
    }
    return out;
}

} // namespace

std::optional<AuditFlag> detect_redundant_evidence(const Example& e) {
    const Program& p = e.program;
    const Table& table = e.context.table;
    if (p.is_atomic() || p.children.size() != 2) return std::nullopt;
    const auto final_keys = keys_of(e.answers);

    switch (p.op) {
    case Operation::intersect:
        for (int side = 0; side < 2; ++side) {
            const ExecResult r = execute(p.children[side], Context{e.context.context_id, table, {}, {}, {}});
            if (keys_of(r.answers) == final_keys) {
                return AuditFlag{e.qid, AuditKind::redundant_evidence,
                                 std::string(side == 0 ? "left" : "right") + " argument alone yields the answer"};
            }
        }
        return std::nullopt;
    case Operation::compare: {
        if (!p.compare_column || !p.compare_op) return std::nullopt;
        const std::size_t col = *p.compare_column;
        const SemanticType type = table.columns.at(col).semantic_type;
        std::optional<double> best;
        std::vector<std::size_t> best_rows;
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            auto k = ordering_key(type, table.rows[r][col].text);
            if (!k) continue;
            const bool better = !best || (*p.compare_op == Extremum::max ? *k > *best : *k < *best);
            if (better) {
                best = k;
                best_rows = {r};
            } else if (*k == *best) {
                best_rows.push_back(r);
            }
        }
        if (best_rows.size() != 1) return std::nullopt;
        auto winner = resolve_answer_row(table, e.answers);
        if (winner && *winner == best_rows.front()) {
            return AuditFlag{e.qid, AuditKind::redundant_evidence,
                             "the answer holds the table-wide " + compare_phrase(table, col, *p.compare_op) + " " +
                                 table.columns[col].header};
        }
        return std::nullopt;
    }
    case Operation::compose: {
        const Program& outer = p.children[0];
        if (!outer.atomic || outer.atomic->modality != Modality::table || !outer.atomic->predicate) {
            return std::nullopt;
        }
        TablePredicate unbridged = *outer.atomic->predicate;
        unbridged.condition_column.reset();
        unbridged.condition_value.reset();
        const auto cells = select_table_cells(table, unbridged);
        std::set<std::string> values;
        for (const auto& c : cells) values.insert(normalize_answer(table.rows[c.row][c.column].text));
        std::set<std::string> gold;
        for (const auto& v : e.answers.values) gold.insert(normalize_answer(v));
        if (!values.empty() && values == gold) {
            return AuditFlag{e.qid, AuditKind::redundant_evidence, "the outer table question is answered without the bridge"};
        }
        return std::nullopt;
    }
    case Operation::atomic:
        break;
    }
    return std::nullopt;
}

std::vector<AuditFlag> audit_dataset(const std::vector<Example>& examples) {
    std::vector<AuditFlag> out;
    for (const auto& e : examples) {
        if (auto f = detect_weak_distractors(e)) out.push_back(*f);
        if (auto f = detect_redundant_evidence(e)) out.push_back(*f);
    }
    return out;
}

} // namespace mmqa
