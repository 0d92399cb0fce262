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

#include "mmqa/composer.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

// ---- Program ---------------------------------------------------------------

Program Program::leaf(AtomicQuestion question, std::string question_type) {
    Program p;
    p.op = Operation::atomic;
    p.atomic = std::move(question);
    p.question_type = std::move(question_type);
    return p;
}

Program Program::compose(Program outer, Program inner, std::string question_type) {
    Program p;
    p.op = Operation::compose;
    p.children = {std::move(outer), std::move(inner)};
    p.question_type = std::move(question_type);
    return p;
}

Program Program::intersect(Program left, Program right, std::string question_type) {
    Program p;
    p.op = Operation::intersect;
    p.children = {std::move(left), std::move(right)};
    p.question_type = std::move(question_type);
    return p;
}

Program Program::compare(Program left, Program right, std::size_t column, Extremum op, std::string question_type) {
    Program p;
    p.op = Operation::compare;
    p.children = {std::move(left), std::move(right)};
    p.compare_column = column;
    p.compare_op = op;
    p.question_type = std::move(question_type);
    return p;
}

std::size_t Program::depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth());
    return is_atomic() ? 0 : d + 1;
}

std::vector<const AtomicQuestion*> Program::leaves() const {
    if (is_atomic()) return {atomic ? &*atomic : nullptr};
    std::vector<const AtomicQuestion*> out;
    for (const auto& c : children) {
        auto sub = c.leaves();
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

// ---- Table predicates ------------------------------------------------------

std::vector<CellCoord> select_table_cells(const Table& table, const TablePredicate& p) {
    if (p.target_column >= table.column_count()) throw ValidationError("predicate target column out of range");
    if (p.condition_column && *p.condition_column >= table.column_count()) {
        throw ValidationError("predicate condition column out of range");
    }
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (p.condition_column && p.condition_value &&
            text::normalize_for_match(table.rows[r][*p.condition_column].text) !=
                text::normalize_for_match(*p.condition_value)) {
            continue;
        }
        rows.push_back(r);
    }
    std::vector<CellCoord> cells;
    if (!p.superlative) {
        for (auto r : rows) {
            if (!text::trim(table.rows[r][p.target_column].text).empty()) cells.push_back({r, p.target_column});
        }
        return cells;
    }
    const SemanticType type = table.columns[p.target_column].semantic_type;
    std::optional<double> best;
    std::vector<std::pair<std::size_t, double>> keyed;
    for (auto r : rows) {
        auto k = ordering_key(type, table.rows[r][p.target_column].text);
        if (!k) continue;
        keyed.emplace_back(r, *k);
        if (!best || (*p.superlative == Extremum::max ? *k > *best : *k < *best)) best = *k;
    }
    for (const auto& [r, k] : keyed) {
        if (k == *best) cells.push_back({r, p.target_column});
    }
    return cells;
}

AnswerList execute_table_predicate(const Table& table, const TablePredicate& predicate) {
    AnswerList out;
    std::vector<std::string> titles;
    bool entities = true;
    for (const auto& c : select_table_cells(table, predicate)) {
        const Cell& cell = table.rows[c.row][c.column];
        out.values.push_back(cell.text);
        if (cell.links.size() == 1) {
            titles.push_back(cell.links.front());
        } else {
            entities = false;
        }
    }
    if (entities && !out.values.empty()) out.entity_titles = std::move(titles);
    return out;
}

std::optional<std::size_t> resolve_answer_row(const Table& table, const AnswerList& answers, std::size_t index) {
    if (index >= answers.size()) return std::nullopt;
    std::vector<std::size_t> rows;
    if (answers.entity_titles) {
        rows = table.rows_linking((*answers.entity_titles)[index]);
    } else {
        const std::string key = text::normalize_for_match(answers.values[index]);
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            for (const auto& cell : table.rows[r]) {
                if (text::normalize_for_match(cell.text) == key) {
                    rows.push_back(r);
                    break;
                }
            }
        }
    }
    if (rows.size() != 1) return std::nullopt;
    return rows.front();
}

// ---- Execution -------------------------------------------------------------

namespace {

std::string entity_key(const AnswerList& a, std::size_t i) {
    return text::normalize_for_match(a.entity_titles ? (*a.entity_titles)[i] : a.values[i]);
}

AnswerList concat(const AnswerList& a, const AnswerList& b) {
    AnswerList out = a;
    out.values.insert(out.values.end(), b.values.begin(), b.values.end());
    if (a.entity_titles && b.entity_titles) {
        out.entity_titles->insert(out.entity_titles->end(), b.entity_titles->begin(), b.entity_titles->end());
    } else {
        out.entity_titles.reset();
    }
    return out;
}

} // namespace

ExecResult execute(const Program& program, const Context& context) {
    switch (program.op) {
    case Operation::atomic: {
        if (!program.atomic) throw CompositionError("atomic node without a question");
        if (!program.children.empty()) throw CompositionError("atomic node with children");
        return ExecResult{program.atomic->answers, std::nullopt};
    }
    case Operation::compose: {
        if (program.children.size() != 2) throw CompositionError("compose takes two arguments");
        const Program& outer = program.children[0];
        if (!outer.is_atomic() || !outer.atomic) throw CompositionError("compose outer must be an atomic question");
        if (outer.atomic->mentions.size() != 1) {
            throw CompositionError("compose outer must mention exactly one entity, found " +
                                   std::to_string(outer.atomic->mentions.size()));
        }
        const ExecResult inner = execute(program.children[1], context);
        if (inner.answers.size() != 1 || !inner.answers.is_entity_list()) {
            throw CompositionError("compose inner must answer with a single entity");
        }
        const std::string& title = outer.atomic->mentions.front().title;
        if (text::normalize_for_match(inner.answers.entity_titles->front()) != text::normalize_for_match(title)) {
            throw CompositionError("compose inner answers '" + inner.answers.entity_titles->front() +
                                   "', not the mentioned entity '" + title + "'");
        }
        return ExecResult{outer.atomic->answers, inner.answers};
    }
    case Operation::intersect: {
        if (program.children.size() != 2) throw CompositionError("intersect takes two arguments");
        const ExecResult left = execute(program.children[0], context);
        const ExecResult right = execute(program.children[1], context);
        for (const auto* side : {&left, &right}) {
            if (!side->answers.is_entity_list() || side->answers.size() < 2) {
                throw CompositionError("intersect arguments must each answer with more than one entity");
            }
        }
        std::set<std::string> right_keys;
        for (std::size_t i = 0; i < right.answers.size(); ++i) right_keys.insert(entity_key(right.answers, i));
        AnswerList out{{}, std::vector<std::string>{}};
        std::set<std::string> seen;
        for (std::size_t i = 0; i < left.answers.size(); ++i) {
            const std::string key = entity_key(left.answers, i);
            if (!right_keys.count(key) || !seen.insert(key).second) continue;
            out.values.push_back(left.answers.values[i]);
            out.entity_titles->push_back((*left.answers.entity_titles)[i]);
        }
        if (out.empty()) throw CompositionError("intersect of disjoint answer lists");
        return ExecResult{std::move(out), left.answers};
    }
    case Operation::compare: {
        if (program.children.size() != 2) throw CompositionError("compare takes two arguments");
        if (!program.compare_column || !program.compare_op) throw CompositionError("compare needs a column and op");
        const std::size_t col = *program.compare_column;
        if (col >= context.table.column_count()) throw CompositionError("compare column out of range");
        const SemanticType type = context.table.columns[col].semantic_type;
        if (type != SemanticType::date && type != SemanticType::numeric) {
            throw CompositionError("compare column must be date or numeric");
        }
        const ExecResult left = execute(program.children[0], context);
        const ExecResult right = execute(program.children[1], context);
        double keys[2];
        const ExecResult* sides[2] = {&left, &right};
        for (int s = 0; s < 2; ++s) {
            const AnswerList& a = sides[s]->answers;
            if (a.size() != 1 || !a.is_entity_list()) {
                throw CompositionError("compare arguments must each answer with one entity");
            }
            auto row = resolve_answer_row(context.table, a);
            if (!row) throw CompositionError("compare answer '" + a.values.front() + "' does not resolve to one row");
            auto k = ordering_key(type, context.table.rows[*row][col].text);
            if (!k) throw CompositionError("compare value does not parse as " + std::string(to_string(type)));
            keys[s] = *k;
        }
        if (keys[0] == keys[1]) throw CompositionError("compare tie");
        const bool left_wins = *program.compare_op == Extremum::max ? keys[0] > keys[1] : keys[0] < keys[1];
        return ExecResult{left_wins ? left.answers : right.answers, concat(left.answers, right.answers)};
    }
    }
    throw CompositionError("unknown operation");
}

void validate_program(const Program& program, const Context& context) {
    if (program.depth() > 2) throw CompositionError("programs are limited to two operation levels");
    (void)execute(program, context);
}

// ---- Rendering -------------------------------------------------------------

namespace {

const std::set<std::string>& question_words() {
    static const std::set<std::string> words = {"what", "which", "who",  "whom", "whose", "where", "when",
                                                "how",  "is",    "was",  "did",  "does",  "do",    "are",
                                                "were", "why",   "can",  "has",  "have",  "in"};
    return words;
}

const std::set<std::string>& wh_words() {
    static const std::set<std::string> words = {"what", "which", "who", "whom", "whose", "where", "when", "how", "why"};
    return words;
}

const std::set<std::string>& copulas() {
    static const std::set<std::string> words = {"is", "was", "are", "were"};
    return words;
}

std::string strip_question_mark(std::string s) {
    s = text::trim(s);
    while (!s.empty() && (s.back() == '?' || s.back() == ' ')) s.pop_back();
    return s;
}

// First whitespace-delimited word, lowercased, and the offset after it.
std::pair<std::string, std::size_t> first_word(std::string_view s, std::size_t from = 0) {
    while (from < s.size() && s[from] == ' ') ++from;
    std::size_t end = from;
    while (end < s.size() && s[end] != ' ') ++end;
    std::size_t next = end;
    while (next < s.size() && s[next] == ' ') ++next;
    return {text::to_lower(s.substr(from, end - from)), next};
}

std::string lower_first_char(std::string s) {
    if (!s.empty() && s.front() >= 'A' && s.front() <= 'Z') s.front() = static_cast<char>(s.front() - 'A' + 'a');
    return s;
}

std::string drop_first_word(const std::string& s) {
    return s.substr(first_word(s).second);
}

// Inner question as a noun phrase for Compose substitution.
std::string compose_fragment(const std::string& body) {
    const std::string s = strip_question_mark(body);
    const auto [w1, after1] = first_word(s);
    const auto [w2, after2] = first_word(s, after1);
    if ((w1 == "who" || w1 == "what") && copulas().count(w2)) return s.substr(after2);
    if (wh_words().count(w1)) return lower_first_char(s);
    return s;
}

// Compare argument: first word dropped, plus a following copula.
std::string compare_fragment(const std::string& body) {
    const std::string s = strip_question_mark(body);
    const auto [w1, after1] = first_word(s);
    const auto [w2, after2] = first_word(s, after1);
    return copulas().count(w2) ? s.substr(after2) : s.substr(after1);
}

} // namespace

std::string open_domain_prefix(const Table& table) {
    return "In the " + table.table_title + " of " + table.page_title + ", ";
}

std::string compare_phrase(const Table& table, std::size_t column, Extremum op) {
    const bool temporal = table.columns.at(column).semantic_type == SemanticType::date || is_year_valued(table, column);
    if (temporal) return op == Extremum::max ? "most recent" : "earliest";
    return op == Extremum::max ? "highest" : "lowest";
}

std::string render_body(const Program& program, const Context& context) {
    switch (program.op) {
    case Operation::atomic:
        if (!program.atomic) throw CompositionError("atomic node without a question");
        return program.atomic->pl_text;
    case Operation::compose: {
        const Program& outer = program.children.at(0);
        if (!outer.atomic || outer.atomic->mentions.size() != 1) {
            throw CompositionError("compose outer must mention exactly one entity");
        }
        std::string out = outer.atomic->pl_text;
        const std::string& surface = outer.atomic->mentions.front().surface;
        const auto pos = out.find(surface);
        if (surface.empty() || pos == std::string::npos) {
            throw CompositionError("mention '" + surface + "' not found in '" + out + "'");
        }
        out.replace(pos, surface.size(), compose_fragment(render_body(program.children.at(1), context)));
        return out;
    }
    case Operation::intersect: {
        std::string right = drop_first_word(text::trim(render_body(program.children.at(1), context)));
        if (right.empty() || right.back() != '?') right.push_back('?');
        return strip_question_mark(render_body(program.children.at(0), context)) + " and " + right;
    }
    case Operation::compare: {
        if (!program.compare_column || !program.compare_op) throw CompositionError("compare needs a column and op");
        const std::size_t col = *program.compare_column;
        return "What has " + compare_phrase(context.table, col, *program.compare_op) + " " +
               text::to_lower(context.table.columns.at(col).header) + ", " +
               compare_fragment(render_body(program.children.at(0), context)) + ", or " +
               compare_fragment(render_body(program.children.at(1), context)) + "?";
    }
    }
    throw CompositionError("unknown operation");
}

std::string render_pl(const Program& program, const Context& context) {
    std::string body = render_body(program, context);
    if (question_words().count(first_word(body).first)) body = lower_first_char(body);
    return open_domain_prefix(context.table) + body;
}

std::set<Modality> modalities_used(const Program& program) {
    std::set<Modality> out;
    for (const auto* leaf : program.leaves()) {
        if (leaf) out.insert(answerer_modality(leaf->modality));
    }
    return out;
}

ComposedQuestion make_question(Program program, const Context& context) {
    if (program.depth() > 2) throw CompositionError("programs are limited to two operation levels");
    ExecResult result = execute(program, context);
    ComposedQuestion q;
    q.pl_text = render_pl(program, context);
    q.answers = std::move(result.answers);
    q.intermediate_answers = std::move(result.intermediate);
    q.modalities_used = modalities_used(program);
    q.program = std::move(program);
    return q;
}

ComposedQuestion compose(const Program& outer, const Program& inner, const Context& context,
                         std::string question_type) {
    return make_question(Program::compose(outer, inner, std::move(question_type)), context);
}

ComposedQuestion intersect(const Program& left, const Program& right, const Context& context,
                           std::string question_type) {
    return make_question(Program::intersect(left, right, std::move(question_type)), context);
}

ComposedQuestion compare(const Program& left, const Program& right, std::size_t column, Extremum op,
                         const Context& context, std::string question_type) {
    return make_question(Program::compare(left, right, column, op, std::move(question_type)), context);
}

std::string canonical_program_key(const Program& program) {
    switch (program.op) {
    case Operation::atomic:
        return "q:" + (program.atomic ? program.atomic->id : std::string("?"));
    case Operation::compose:
    case Operation::intersect:
        return std::string(to_string(program.op)) + "(" + canonical_program_key(program.children.at(0)) + "," +
               canonical_program_key(program.children.at(1)) + ")";
    case Operation::compare:
        return "compare[" + std::to_string(program.compare_column.value_or(0)) + "," +
               std::string(to_string(program.compare_op.value_or(Extremum::max))) + "](" +
               canonical_program_key(program.children.at(0)) + "," + canonical_program_key(program.children.at(1)) +
               ")";
    }
    return {};
}

// ---- Instantiation ---------------------------------------------------------

namespace {

bool single_entity(const AtomicQuestion& q) {
    return q.answers.size() == 1 && q.answers.is_entity_list();
}

bool entity_list(const AtomicQuestion& q) {
    return q.answers.size() > 1 && q.answers.is_entity_list();
}

std::set<std::string> answer_keys(const AnswerList& a) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.insert(entity_key(a, i));
    return out;
}

bool leaks_answer(const ComposedQuestion& q) {
    for (std::size_t i = 0; i < q.answers.size(); ++i) {
        if (text::contains_normalized(q.pl_text, q.answers.values[i])) return true;
        if (q.answers.entity_titles && text::contains_normalized(q.pl_text, (*q.answers.entity_titles)[i])) {
            return true;
        }
    }
    return false;
}

bool degenerate(const ComposedQuestion& q) {
    if (q.answers.empty()) return true;
    if (leaks_answer(q)) return true;
    const Program& p = q.program;
    if (p.op == Operation::compose && q.intermediate_answers &&
        answer_keys(q.answers) == answer_keys(*q.intermediate_answers)) {
        return true;
    }
    if (p.op == Operation::intersect) {
        const auto keys = answer_keys(q.answers);
        if (keys == answer_keys(p.children[0].atomic->answers) || keys == answer_keys(p.children[1].atomic->answers)) {
            return true;
        }
    }
    return false;
}

// Column of the cell linking a single-entity answer within its resolved row.
std::optional<std::size_t> answer_column(const Table& table, const AnswerList& answers) {
    const auto row = resolve_answer_row(table, answers);
    if (!row || !answers.entity_titles) return std::nullopt;
    const auto& title = answers.entity_titles->front();
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        const auto& links = table.rows[*row][c].links;
        if (std::find(links.begin(), links.end(), title) != links.end()) return c;
    }
    return std::nullopt;
}

std::vector<const AtomicQuestion*> of_modality(const std::vector<AtomicQuestion>& bank, Modality m) {
    std::vector<const AtomicQuestion*> out;
    for (const auto& q : bank) {
        if (q.modality == m) out.push_back(&q);
    }
    return out;
}

std::vector<Program> candidates(const TemplateSpec& spec, const Context& context,
                                const std::vector<AtomicQuestion>& bank) {
    std::vector<Program> out;
    const auto& label = spec.label;
    switch (spec.operation) {
    case Operation::atomic:
        for (const auto* q : of_modality(bank, spec.slots[0])) out.push_back(Program::leaf(*q, label));
        break;
    case Operation::compose:
        for (const auto* outer : of_modality(bank, spec.slots[0])) {
            if (outer->mentions.size() != 1) continue;
            const std::string key = text::normalize_for_match(outer->mentions.front().title);
            for (const auto* inner : of_modality(bank, spec.slots[1])) {
                if (!single_entity(*inner) || entity_key(inner->answers, 0) != key) continue;
                out.push_back(Program::compose(Program::leaf(*outer), Program::leaf(*inner), label));
            }
        }
        break;
    case Operation::intersect:
        for (const auto* left : of_modality(bank, spec.slots[0])) {
            if (!entity_list(*left)) continue;
            for (const auto* right : of_modality(bank, spec.slots[1])) {
                if (!entity_list(*right)) continue;
                out.push_back(Program::intersect(Program::leaf(*left), Program::leaf(*right), label));
            }
        }
        break;
    case Operation::compare: {
        std::vector<std::size_t> columns;
        for (std::size_t c = 0; c < context.table.column_count(); ++c) {
            const auto t = context.table.columns[c].semantic_type;
            if (t == SemanticType::date || t == SemanticType::numeric) columns.push_back(c);
        }
        for (const auto* left : of_modality(bank, spec.slots[0])) {
            if (!single_entity(*left)) continue;
            const auto left_column = answer_column(context.table, left->answers);
            if (!left_column) continue;
            for (const auto* right : of_modality(bank, spec.slots[1])) {
                if (!single_entity(*right) || answer_column(context.table, right->answers) != left_column) continue;
                if (entity_key(left->answers, 0) == entity_key(right->answers, 0)) continue;
                for (auto c : columns) {
                    for (Extremum op : {Extremum::min, Extremum::max}) {
                        out.push_back(Program::compare(Program::leaf(*left), Program::leaf(*right), c, op, label));
                    }
                }
            }
        }
        break;
    }
    }
    return out;
}

} // namespace

std::vector<ComposedQuestion> instantiate_templates(const Context& context, const std::vector<AtomicQuestion>& bank,
                                                    const TemplateRegistry& registry,
                                                    const InstantiateConfig& config) {
    std::vector<ComposedQuestion> out;
    for (const auto& spec : registry.templates()) {
        std::vector<ComposedQuestion> kept;
        for (auto& program : candidates(spec, context, bank)) {
            try {
                ComposedQuestion q = make_question(std::move(program), context);
                if (!degenerate(q)) kept.push_back(std::move(q));
            } catch (const CompositionError&) {
            }
        }
        if (kept.size() > config.max_per_template) {
            std::vector<std::size_t> order(kept.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::mt19937_64 rng(config.seed ^ text::fnv1a(context.id + "|" + spec.label));
            std::shuffle(order.begin(), order.end(), rng);
            order.resize(config.max_per_template);
            std::sort(order.begin(), order.end());
            std::vector<ComposedQuestion> sample;
            for (auto i : order) sample.push_back(std::move(kept[i]));
            kept = std::move(sample);
        }
        for (auto& q : kept) out.push_back(std::move(q));
    }
    return out;
}

} // namespace mmqa
