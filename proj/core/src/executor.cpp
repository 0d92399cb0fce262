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

#include "mmqa/executor.hpp"

#include <algorithm>
#include <set>

#include "http_client.hpp"
#include "mmqa/errors.hpp"
#include "mmqa/evaluator.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

std::string_view to_string(Aggregation a) {
    switch (a) {
    case Aggregation::none: return "NONE";
    case Aggregation::sum: return "SUM";
    case Aggregation::mean: return "MEAN";
    case Aggregation::count: return "COUNT";
    case Aggregation::yes: return "YES";
    case Aggregation::no: return "NO";
    }
    return "NONE";
}

Aggregation aggregation_from_string(std::string_view name) {
    const std::string n = text::to_lower(name);
    if (n == "none") return Aggregation::none;
    if (n == "sum") return Aggregation::sum;
    if (n == "mean") return Aggregation::mean;
    if (n == "count") return Aggregation::count;
    if (n == "yes") return Aggregation::yes;
    if (n == "no") return Aggregation::no;
    throw ValidationError("unknown aggregation '" + std::string(name) + "'");
}

// ---- Table answering -------------------------------------------------------

AnswerList table_answer(const Table& table, const TablePredicate& p, Aggregation aggregation) {
    const std::size_t ncols = table.column_count();
    if (p.target_column >= ncols) throw ValidationError("unknown target column " + std::to_string(p.target_column));
    if (p.condition_column && *p.condition_column >= ncols) {
        throw ValidationError("unknown condition column " + std::to_string(*p.condition_column));
    }

    // Row mask from the condition, scanned column-wise.
    std::vector<char> keep(table.row_count(), 1);
    if (p.condition_column && p.condition_value) {
        const std::string want = text::normalize_for_match(*p.condition_value);
        const auto cells = table.column_texts(*p.condition_column);
        for (std::size_t r = 0; r < cells.size(); ++r) keep[r] = text::normalize_for_match(cells[r]) == want;
    }

    std::vector<std::size_t> rows;
    if (p.superlative) {
        const SemanticType type = table.columns[p.target_column].semantic_type;
        std::vector<std::pair<double, std::size_t>> keyed;
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            if (!keep[r]) continue;
            if (auto k = ordering_key(type, table.rows[r][p.target_column].text)) keyed.emplace_back(*k, r);
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        if (!keyed.empty()) {
            const double extreme = *p.superlative == Extremum::min ? keyed.front().first : keyed.back().first;
            for (const auto& [k, r] : keyed) {
                if (k == extreme) rows.push_back(r);
            }
            std::sort(rows.begin(), rows.end());
        }
    } else {
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            if (keep[r] && !text::trim(table.rows[r][p.target_column].text).empty()) rows.push_back(r);
        }
    }

    switch (aggregation) {
    case Aggregation::none: {
        AnswerList out;
        std::vector<std::string> titles;
        for (auto r : rows) {
            const Cell& c = table.rows[r][p.target_column];
            out.values.push_back(c.text);
            if (c.links.size() == 1) titles.push_back(c.links.front());
        }
        if (!rows.empty() && titles.size() == rows.size()) out.entity_titles = std::move(titles);
        return out;
    }
    case Aggregation::sum:
    case Aggregation::mean: {
        double total = 0;
        for (auto r : rows) {
            auto v = parse_number(table.rows[r][p.target_column].text);
            if (!v) throw ValidationError("cell '" + table.rows[r][p.target_column].text + "' is not numeric");
            total += *v;
        }
        if (aggregation == Aggregation::mean) {
            if (rows.empty()) return {};
            total /= static_cast<double>(rows.size());
        }
        return AnswerList::strings({text::format_number(total)});
    }
    case Aggregation::count:
        return AnswerList::strings({std::to_string(rows.size())});
    case Aggregation::yes:
        return AnswerList::strings({"yes"});
    case Aggregation::no:
        return AnswerList::strings({"no"});
    }
    return {};
}

// ---- Answerers -------------------------------------------------------------

namespace {

std::multiset<std::string> normalized(const AnswerList& a) {
    std::multiset<std::string> out;
    for (const auto& v : a.values) out.insert(normalize_answer(v));
    return out;
}

std::string key_at(const AnswerList& a, std::size_t i) {
    return normalize_answer(a.entity_titles ? (*a.entity_titles)[i] : a.values[i]);
}

ScoredAnswers certain(AnswerList a) {
    ScoredAnswers s;
    s.confidences.assign(a.size(), 1.0);
    s.answers = std::move(a);
    return s;
}

const Example& require_example(const AnswerRequest& r) {
    if (!r.example) throw ValidationError("answerer needs the example context");
    return *r.example;
}

} // namespace

ScoredAnswers OracleAnswerer::answer(const AnswerRequest& r) const {
    const Example& e = require_example(r);
    const HopPlan& plan = registry_.at(e.question_type).hop_plan;
    if (!plan.two_hop()) return certain(e.answers);
    if (!e.intermediate_answers) throw ValidationError("example '" + e.qid + "' lacks gold intermediate answers");
    if (r.hop == 1) return certain(*e.intermediate_answers);
    if (r.hop1_answers && normalized(*r.hop1_answers) == normalized(*e.intermediate_answers)) return certain(e.answers);
    return {};
}

namespace {

// Lowercased words joined by single spaces; punctuation separates words.
std::string spaced_words(std::string_view s) {
    std::string out = " ";
    for (const auto& w : text::words(s)) out += text::to_lower(w) + " ";
    return out;
}

bool grounded(std::string_view question, const std::vector<std::string>& terms) {
    const std::string q = spaced_words(question);
    for (const auto& t : terms) {
        if (text::contains_normalized(question, t)) continue;
        const std::string w = spaced_words(t);
        if (w.size() <= 1 || q.find(w) == std::string::npos) return false;
    }
    return true;
}

const AtomicQuestion* first_table_leaf(const Program& p) {
    for (const auto* leaf : p.leaves()) {
        if (leaf && leaf->modality == Modality::table && leaf->predicate) return leaf;
    }
    return nullptr;
}

// Unbridged execution of a leaf predicate.
AnswerList answer_leaf(const Table& table, const TablePredicate& p, std::string_view question) {
    std::vector<std::string> terms;
    if (p.condition_value) terms.push_back(*p.condition_value);
    if (p.superlative) terms.push_back(table.columns.at(p.target_column).header);
    if (!grounded(question, terms)) return {};
    return table_answer(table, p);
}

// The predicate re-targeted at each hop-1 answer as its condition value.
AnswerList answer_bridged(const Table& table, const TablePredicate& p, const AnswerList& hop1,
                          std::string_view question) {
    if (!p.condition_column) return {};
    if (p.superlative && !grounded(question, {table.columns.at(p.target_column).header})) return {};
    AnswerList out;
    std::vector<std::string> titles;
    bool entities = true;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < hop1.size(); ++i) {
        std::string value = hop1.values[i];
        if (hop1.entity_titles) {
            for (const auto& row : table.rows) {
                const Cell& c = row[*p.condition_column];
                if (std::find(c.links.begin(), c.links.end(), (*hop1.entity_titles)[i]) != c.links.end()) {
                    value = c.text;
                    break;
                }
            }
        }
        TablePredicate bridged = p;
        bridged.condition_value = value;
        const AnswerList part = table_answer(table, bridged);
        for (std::size_t k = 0; k < part.size(); ++k) {
            if (!seen.insert(key_at(part, k)).second) continue;
            out.values.push_back(part.values[k]);
            if (part.entity_titles) {
                titles.push_back((*part.entity_titles)[k]);
            } else {
                entities = false;
            }
        }
    }
    if (entities && !out.empty()) out.entity_titles = std::move(titles);
    return out;
}

AnswerList answer_compare(const Table& table, const Program& p, const AnswerList& candidates,
                          std::string_view question) {
    const std::size_t col = *p.compare_column;
    if (!grounded(question, {table.columns.at(col).header})) return {};
    if (candidates.size() != 2) return {};
    const SemanticType type = table.columns[col].semantic_type;
    std::optional<double> keys[2];
    for (std::size_t i = 0; i < 2; ++i) {
        auto row = resolve_answer_row(table, candidates, i);
        if (!row) return {};
        keys[i] = ordering_key(type, table.rows[*row][col].text);
        if (!keys[i]) return {};
    }
    if (*keys[0] == *keys[1]) return {};
    const bool first = *p.compare_op == Extremum::max ? *keys[0] > *keys[1] : *keys[0] < *keys[1];
    const std::size_t i = first ? 0 : 1;
    AnswerList out;
    out.values = {candidates.values[i]};
    if (candidates.entity_titles) out.entity_titles = std::vector<std::string>{(*candidates.entity_titles)[i]};
    return out;
}

} // namespace

ScoredAnswers TableAnswerer::answer(const AnswerRequest& r) const {
    const Example& e = require_example(r);
    const Program& p = e.program;
    const Table& table = e.context.table;

    if (p.op == Operation::compare && p.compare_column && p.compare_op && r.hop1_answers) {
        return certain(answer_compare(table, p, *r.hop1_answers, r.question));
    }
    const AtomicQuestion* leaf = first_table_leaf(p);
    if (!leaf) return {};
    const bool bridged_outer = p.op == Operation::compose && p.children[0].atomic &&
                               p.children[0].atomic->id == leaf->id && p.children[0].atomic->modality == Modality::table;
    if (bridged_outer) {
        if (!r.hop1_answers) return {};
        return certain(answer_bridged(table, *leaf->predicate, *r.hop1_answers, r.question));
    }
    return certain(answer_leaf(table, *leaf->predicate, r.question));
}

ExternalAnswerer::ExternalAnswerer(std::string endpoint, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

ScoredAnswers ExternalAnswerer::answer(const AnswerRequest& r) const {
    json hop1 = nullptr;
    if (r.hop1_answers) hop1 = r.hop1_answers->values;
    json body{{"question", r.question},
              {"question_type", r.question_type},
              {"hop", r.hop},
              {"hop1_answers", hop1},
              {"context_ref", r.example ? json{{"qid", r.example->qid}, {"context_id", r.example->context.context_id},
                                               {"modality", to_string(r.modality)}}
                                        : json(nullptr)}};
    auto res = detail::post_json(endpoint_, body, timeout_);
    if (!res.body) throw Error("external answerer " + endpoint_ + " failed: " + res.error);
    try {
        ScoredAnswers out;
        out.answers = AnswerList::strings(res.body->at("answers").get<std::vector<std::string>>());
        out.confidences = res.body->value("confidences", std::vector<double>(out.answers.size(), 1.0));
        return out;
    } catch (const json::exception& ex) {
        throw Error("external answerer " + endpoint_ + " returned a malformed body: " + ex.what());
    }
}

std::string GoldTypePredictor::predict(const Example& e, std::string_view) const {
    if (e.question_type.empty()) {
        throw ValidationError("question '" + e.qid +
                              "' carries no program metadata; plug in an external type predictor");
    }
    return e.question_type;
}

AnswererSet make_answerers(const std::string& spec) {
    AnswererSet out;
    if (spec == "oracle" || spec == "table-deterministic") {
        auto oracle = std::make_shared<OracleAnswerer>();
        out[Modality::table] = oracle;
        out[Modality::text] = oracle;
        out[Modality::image] = oracle;
        if (spec == "table-deterministic") out[Modality::table] = std::make_shared<TableAnswerer>();
        return out;
    }
    const std::string prefix = "external:";
    if (spec.rfind(prefix, 0) == 0 && spec.size() > prefix.size()) {
        auto ext = std::make_shared<ExternalAnswerer>(spec.substr(prefix.size()));
        out[Modality::table] = ext;
        out[Modality::text] = ext;
        out[Modality::image] = ext;
        return out;
    }
    throw Error("unknown answerer set '" + spec + "' (expected oracle, table-deterministic or external:<endpoint>)");
}

// ---- Strategies ------------------------------------------------------------

Strategy strategy_from_string(std::string_view name) {
    if (name == "autorouting") return Strategy::autorouting;
    if (name == "implicitdecomp") return Strategy::implicitdecomp;
    if (name == "question-only" || name == "context-only") {
        throw Error("strategy '" + std::string(name) +
                    "' is reserved for a generative neural baseline and is not implemented");
    }
    throw Error("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(Strategy s) {
    return s == Strategy::autorouting ? "autorouting" : "implicitdecomp";
}

std::string question_text(const Example& e) {
    return e.nl_question ? *e.nl_question : e.pl_question;
}

namespace {

const ModalityAnswerer& answerer_for(const StrategyContext& ctx, Modality m) {
    auto it = ctx.answerers.find(m);
    if (it == ctx.answerers.end() || !it->second) {
        throw Error("no answerer registered for modality '" + std::string(to_string(m)) + "'");
    }
    return *it->second;
}

} // namespace

AnswerList auto_route(const Example& e, std::string_view question, const StrategyContext& ctx) {
    const std::string type = ctx.predictor.predict(e, question);
    const HopPlan& plan = ctx.registry.at(type).hop_plan;
    const Modality m = plan.final_modality();
    return answerer_for(ctx, m).answer({std::string(question), type, 1, std::nullopt, m, &e}).answers;
}

AnswerList implicit_decomp(const Example& e, std::string_view question, const StrategyContext& ctx) {
    const std::string type = ctx.predictor.predict(e, question);
    const HopPlan& plan = ctx.registry.at(type).hop_plan;
    if (!plan.two_hop()) {
        const Modality m = plan.final_modality();
        return answerer_for(ctx, m).answer({std::string(question), type, 1, std::nullopt, m, &e}).answers;
    }
    const Modality m1 = plan.hops[0].modality;
    const Modality m2 = plan.hops[1].modality;
    const AnswerList a1 = answerer_for(ctx, m1).answer({std::string(question), type, 1, std::nullopt, m1, &e}).answers;
    if (a1.empty()) return {};
    const AnswerList a2 = answerer_for(ctx, m2).answer({std::string(question), type, 2, a1, m2, &e}).answers;
    if (plan.combine == Combine::none) return a2;

    // Intersect keeps hop-1 order; compare keeps the hop-2 answers that are
    // among the hop-1 candidates.
    const AnswerList& base = plan.combine == Combine::intersect ? a1 : a2;
    const AnswerList& filter = plan.combine == Combine::intersect ? a2 : a1;
    std::set<std::string> allowed;
    for (std::size_t i = 0; i < filter.size(); ++i) {
        allowed.insert(key_at(filter, i));
        allowed.insert(normalize_answer(filter.values[i]));
    }
    AnswerList out;
    std::vector<std::string> titles;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const std::string k = key_at(base, i);
        if ((!allowed.count(k) && !allowed.count(normalize_answer(base.values[i]))) || !seen.insert(k).second) continue;
        out.values.push_back(base.values[i]);
        if (base.entity_titles) titles.push_back((*base.entity_titles)[i]);
    }
    if (base.entity_titles && !out.empty()) out.entity_titles = std::move(titles);
    return out;
}

AnswerList run_strategy(Strategy s, const Example& e, std::string_view question, const StrategyContext& ctx) {
    return s == Strategy::autorouting ? auto_route(e, question, ctx) : implicit_decomp(e, question, ctx);
}

} // namespace mmqa
