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

#include "mmqa/qgen_atomic.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

AnswerList AnswerList::strings(std::vector<std::string> values) {
    return AnswerList{std::move(values), std::nullopt};
}

AnswerList AnswerList::entities(std::vector<std::string> titles) {
    AnswerList a;
    a.values = titles;
    a.entity_titles = std::move(titles);
    return a;
}

void validate_answers(const AnswerList& answers) {
    if (answers.values.empty()) throw ValidationError("answer list is empty");
    if (answers.entity_titles && answers.entity_titles->size() != answers.values.size()) {
        throw ValidationError("entity_titles is not parallel to values");
    }
}

std::string_view to_string(Modality modality) {
    switch (modality) {
    case Modality::table: return "table";
    case Modality::text: return "text";
    case Modality::image: return "image";
    case Modality::image_list: return "image_list";
    }
    return "table";
}

Modality modality_from_string(std::string_view name) {
    if (name == "table") return Modality::table;
    if (name == "text") return Modality::text;
    if (name == "image") return Modality::image;
    if (name == "image_list") return Modality::image_list;
    throw SchemaError("unknown modality '" + std::string(name) + "'");
}

std::string_view to_string(AnswerKind kind) {
    return kind == AnswerKind::entity ? "entity" : "string";
}

AnswerKind answer_kind_from_string(std::string_view name) {
    if (name == "entity") return AnswerKind::entity;
    if (name == "string") return AnswerKind::string;
    throw SchemaError("unknown answer kind '" + std::string(name) + "'");
}

std::string_view to_string(Extremum op) {
    return op == Extremum::min ? "min" : "max";
}

Extremum extremum_from_string(std::string_view name) {
    if (name == "min") return Extremum::min;
    if (name == "max") return Extremum::max;
    throw SchemaError("unknown extremum '" + std::string(name) + "'");
}

// ---- Table questions -------------------------------------------------------

namespace {

bool uses_temporal_words(const Table& table, std::size_t column) {
    return table.columns.at(column).semantic_type == SemanticType::date || is_year_valued(table, column);
}

std::string superlative_word(const Table& table, std::size_t column, Extremum op) {
    if (uses_temporal_words(table, column)) return op == Extremum::max ? "MOST RECENT" : "EARLIEST";
    return op == Extremum::max ? "HIGHEST" : "LOWEST";
}

// Rows whose condition cell normalizes equal to the condition value.
std::vector<std::size_t> matching_rows(const Table& table, std::size_t column, const std::string& value) {
    const std::string key = text::normalize_for_match(value);
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (text::normalize_for_match(table.rows[r][column].text) == key) rows.push_back(r);
    }
    return rows;
}

std::vector<EntityMention> condition_mentions(const Table& table, std::size_t column,
                                              const std::vector<std::size_t>& rows,
                                              const std::string& value) {
    std::set<std::string> titles;
    for (auto r : rows) {
        const auto& links = table.rows[r][column].links;
        if (links.size() != 1) return {};
        titles.insert(links.front());
    }
    if (titles.size() != 1) return {};
    return {EntityMention{*titles.begin(), "[" + value + "]"}};
}

// Answers from the given cells; entity-valued when every cell links exactly
// one entity.
std::pair<AnswerList, AnswerKind> answers_from_cells(const Table& table, const std::vector<CellCoord>& cells) {
    std::vector<std::string> values;
    std::vector<std::string> titles;
    bool all_entities = true;
    for (const auto& c : cells) {
        const Cell& cell = table.rows[c.row][c.column];
        values.push_back(cell.text);
        if (cell.links.size() == 1) {
            titles.push_back(cell.links.front());
        } else {
            all_entities = false;
        }
    }
    if (all_entities && !cells.empty()) {
        return {AnswerList{std::move(values), std::move(titles)}, AnswerKind::entity};
    }
    return {AnswerList::strings(std::move(values)), AnswerKind::string};
}

struct Condition {
    std::size_t column;
    std::string value;
    std::vector<std::size_t> rows;
};

// Distinct non-empty condition values per column that stay under the row
// fraction limit, in column then first-appearance order.
std::vector<Condition> usable_conditions(const Table& table, double max_fraction) {
    std::vector<Condition> out;
    const auto n = static_cast<double>(table.row_count());
    for (std::size_t z = 0; z < table.column_count(); ++z) {
        std::set<std::string> seen;
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            const std::string value = text::trim(table.rows[r][z].text);
            if (value.empty()) continue;
            if (!seen.insert(text::normalize_for_match(value)).second) continue;
            auto rows = matching_rows(table, z, value);
            if (static_cast<double>(rows.size()) > max_fraction * n) continue;
            out.push_back(Condition{z, value, std::move(rows)});
        }
    }
    return out;
}

template <typename T>
void cap_deterministically(std::vector<T>& items, std::size_t cap, std::uint64_t seed) {
    if (items.size() <= cap) return;
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(cap);
    std::sort(order.begin(), order.end());
    std::vector<T> kept;
    kept.reserve(cap);
    for (auto i : order) kept.push_back(std::move(items[i]));
    items = std::move(kept);
}

std::string short_hash(std::string_view s) {
    return text::hex_digest(text::fnv1a(s), 8);
}

} // namespace

std::string render_table_question(const Table& table, const TablePredicate& p) {
    const std::string& target = table.columns.at(p.target_column).header;
    if (p.superlative) {
        std::string out = "What was the " + superlative_word(table, p.target_column, *p.superlative) + " [" +
                          target + "](s)";
        if (p.condition_column && p.condition_value) {
            out += " where the [" + table.columns.at(*p.condition_column).header + "] was [" +
                   *p.condition_value + "]";
        }
        return out + "?";
    }
    if (!p.condition_column || !p.condition_value) {
        throw ValidationError("lookup predicate needs a condition");
    }
    return "Which cells in [" + target + "] have the [" + *p.condition_value + "] in [" +
           table.columns.at(*p.condition_column).header + "]?";
}

std::vector<AtomicQuestion> gen_table_lookup_questions(const Table& table, const TableQuestionConfig& config) {
    std::vector<AtomicQuestion> out;
    if (table.column_count() < 2) return out;

    for (const auto& cond : usable_conditions(table, config.max_condition_row_fraction)) {
        for (std::size_t x = 0; x < table.column_count(); ++x) {
            if (x == cond.column) continue;
            std::vector<CellCoord> cells;
            for (auto r : cond.rows) {
                if (!text::trim(table.rows[r][x].text).empty()) cells.push_back({r, x});
            }
            if (cells.empty()) continue;

            AtomicQuestion q;
            q.modality = Modality::table;
            q.predicate = TablePredicate{x, cond.column, cond.value, std::nullopt};
            q.pl_text = render_table_question(table, *q.predicate);
            auto [answers, kind] = answers_from_cells(table, cells);
            q.answers = std::move(answers);
            q.answer_kind = kind;
            q.anchors.cells = cells;
            for (auto r : cond.rows) q.anchors.cells.push_back({r, cond.column});
            std::sort(q.anchors.cells.begin(), q.anchors.cells.end());
            q.anchors.columns = {x, cond.column};
            q.mentions = condition_mentions(table, cond.column, cond.rows, cond.value);
            q.id = "tbl-lookup-" + std::to_string(x) + "-" + std::to_string(cond.column) + "-" +
                   short_hash(cond.value);
            out.push_back(std::move(q));
        }
    }
    cap_deterministically(out, config.max_lookup_questions, config.seed);
    return out;
}

std::vector<AtomicQuestion> gen_table_superlative_questions(const Table& table, const TableQuestionConfig& config) {
    std::vector<AtomicQuestion> out;
    const auto conditions = usable_conditions(table, config.max_condition_row_fraction);

    for (std::size_t c = 0; c < table.column_count(); ++c) {
        const SemanticType type = table.columns[c].semantic_type;
        if (type != SemanticType::date && type != SemanticType::numeric) continue;

        auto emit = [&](const std::vector<std::size_t>& rows, const Condition* cond) {
            std::vector<std::pair<std::size_t, double>> keyed;
            for (auto r : rows) {
                if (auto k = ordering_key(type, table.rows[r][c].text)) keyed.emplace_back(r, *k);
            }
            if (keyed.size() < 2) return;
            for (Extremum op : {Extremum::min, Extremum::max}) {
                double best = keyed.front().second;
                for (const auto& [r, k] : keyed) best = op == Extremum::min ? std::min(best, k) : std::max(best, k);
                std::vector<CellCoord> cells;
                for (const auto& [r, k] : keyed) {
                    if (k == best) cells.push_back({r, c});
                }
                AtomicQuestion q;
                q.modality = Modality::table;
                q.predicate = TablePredicate{c, std::nullopt, std::nullopt, op};
                if (cond) {
                    q.predicate->condition_column = cond->column;
                    q.predicate->condition_value = cond->value;
                    q.mentions = condition_mentions(table, cond->column, cond->rows, cond->value);
                }
                q.pl_text = render_table_question(table, *q.predicate);
                auto [answers, kind] = answers_from_cells(table, cells);
                q.answers = std::move(answers);
                q.answer_kind = kind;
                q.anchors.cells = cells;
                q.anchors.columns = {c};
                if (cond) q.anchors.columns.push_back(cond->column);
                q.id = "tbl-sup-" + std::to_string(c) + "-" + std::string(to_string(op));
                if (cond) q.id += "-" + std::to_string(cond->column) + "-" + short_hash(cond->value);
                out.push_back(std::move(q));
            }
        };

        std::vector<std::size_t> all(table.row_count());
        for (std::size_t r = 0; r < all.size(); ++r) all[r] = r;
        emit(all, nullptr);
        for (const auto& cond : conditions) {
            if (cond.column == c) continue;
            emit(cond.rows, &cond);
        }
    }
    cap_deterministically(out, config.max_superlative_questions, config.seed ^ 0x5bd1e995ULL);
    return out;
}

// ---- Image bank ------------------------------------------------------------

ImageBankRecord parse_image_bank_record(const json& rec, std::size_t line) {
    const std::string where = "image bank line " + std::to_string(line);
    if (!rec.is_object()) throw SchemaError(where + ": expected an object");
    auto str = [&](const char* key) -> std::string {
        if (!rec.contains(key) || !rec[key].is_string()) {
            throw SchemaError(where + ": missing string field '" + key + "'");
        }
        return rec[key].get<std::string>();
    };
    ImageBankRecord r;
    r.id = str("id");
    r.context_id = str("context");
    const std::string kind = str("kind");
    if (kind != "single" && kind != "list") throw SchemaError(where + ": kind must be single or list");
    r.list = kind == "list";
    r.question = str("question");
    if (!rec.contains("answers") || !rec["answers"].is_array()) throw SchemaError(where + ": missing 'answers'");
    for (const auto& a : rec["answers"]) {
        if (!a.is_string()) throw SchemaError(where + ": answers must be strings");
        r.answers.push_back(a.get<std::string>());
    }
    if (auto it = rec.find("image_ids"); it != rec.end() && it->is_array()) {
        for (const auto& i : *it) r.image_ids.push_back(i.get<std::string>());
    }
    if (auto it = rec.find("column_anchor"); it != rec.end() && !it->is_null()) {
        r.column_anchor = it->is_number_unsigned() ? std::to_string(it->get<std::size_t>()) : it->get<std::string>();
    }
    if (auto it = rec.find("entity_focus"); it != rec.end() && it->is_string()) r.entity_focus = it->get<std::string>();
    return r;
}

std::vector<ImageBankRecord> read_image_bank(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open image bank " + path.string());
    std::vector<ImageBankRecord> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw SchemaError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
        out.push_back(parse_image_bank_record(rec, n));
    }
    return out;
}

std::set<std::string> read_vocabulary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open vocabulary " + path.string());
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (!t.empty() && t.front() != '#') out.insert(text::to_lower(t));
    }
    return out;
}

namespace {

// Finds `title` as a whole-token, case-insensitive span of `question`.
std::optional<std::string> find_surface(const std::string& question, const std::string& title) {
    const auto tokens = text::tokenize(question);
    const auto seq = text::words(title);
    if (seq.empty()) return std::nullopt;
    for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
        bool ok = true;
        for (std::size_t k = 0; k < seq.size() && ok; ++k) ok = tokens[i + k].text == seq[k];
        if (ok) {
            const auto b = tokens[i].begin;
            const auto e = tokens[i + seq.size() - 1].end;
            return question.substr(b, e - b);
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> resolve_column(const Table& table, const std::string& anchor) {
    if (!anchor.empty() && std::all_of(anchor.begin(), anchor.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        const std::size_t idx = std::stoul(anchor);
        if (idx < table.column_count()) return idx;
        return std::nullopt;
    }
    return table.find_column(anchor);
}

std::string as_question(std::string q) {
    q = text::trim(q);
    if (!q.empty() && q.back() != '?') q.push_back('?');
    if (!q.empty() && q.front() >= 'a' && q.front() <= 'z') q.front() = static_cast<char>(q.front() - 'a' + 'A');
    return q;
}

} // namespace

std::vector<AtomicQuestion> ingest_image_questions(const std::vector<ImageBankRecord>& records,
                                                   const Context& context,
                                                   const std::set<std::string>& vocabulary,
                                                   const std::set<std::string>& blocklist) {
    std::vector<AtomicQuestion> out;
    for (const auto& rec : records) {
        if (rec.context_id != context.id) continue;
        const std::string where = "image question '" + rec.id + "'";
        for (const auto& id : rec.image_ids) {
            if (!context.find_image(id)) throw ReferenceError(where + ": dangling image id '" + id + "'");
        }
        AtomicQuestion q;
        q.id = rec.id;
        q.pl_text = as_question(rec.question);
        if (!rec.list) {
            if (rec.answers.size() != 1) {
                throw ValidationError(where + ": single-image questions take exactly one answer");
            }
            if (!vocabulary.count(text::to_lower(rec.answers.front()))) {
                throw ValidationError(where + ": answer '" + rec.answers.front() + "' is not in the vocabulary");
            }
            if (rec.image_ids.size() != 1) throw ValidationError(where + ": single-image questions anchor one image");
            q.modality = Modality::image;
            q.answers = AnswerList::strings({text::to_lower(rec.answers.front())});
            q.answer_kind = AnswerKind::string;
            q.anchors.image_ids = rec.image_ids;
            if (rec.entity_focus) {
                if (!context.find_entity(*rec.entity_focus)) {
                    throw ReferenceError(where + ": unknown entity focus '" + *rec.entity_focus + "'");
                }
                if (auto surface = find_surface(q.pl_text, *rec.entity_focus)) {
                    q.mentions.push_back(EntityMention{*rec.entity_focus, *surface});
                }
            }
        } else {
            if (!rec.column_anchor) throw ValidationError(where + ": list questions need a column_anchor");
            auto col = resolve_column(context.table, *rec.column_anchor);
            if (!col) throw ReferenceError(where + ": unknown column '" + *rec.column_anchor + "'");
            if (rec.answers.empty()) throw ValidationError(where + ": list questions need answers");
            const auto info = column_cell_info(context, *col, blocklist);
            std::vector<std::string> column_entities;
            std::vector<std::string> image_ids;
            for (const auto& cell : info) {
                if (cell.entity &&
                    std::find(column_entities.begin(), column_entities.end(), *cell.entity) == column_entities.end()) {
                    column_entities.push_back(*cell.entity);
                }
                if (cell.image_id && std::find(image_ids.begin(), image_ids.end(), *cell.image_id) == image_ids.end()) {
                    image_ids.push_back(*cell.image_id);
                }
            }
            std::vector<std::string> titles;
            for (const auto& a : rec.answers) {
                auto it = std::find_if(column_entities.begin(), column_entities.end(), [&](const std::string& e) {
                    return text::normalize_for_match(e) == text::normalize_for_match(a);
                });
                if (it == column_entities.end()) {
                    throw ValidationError(where + ": answer '" + a + "' is not an entity of column '" +
                                          context.table.columns[*col].header + "'");
                }
                titles.push_back(*it);
            }
            q.modality = Modality::image_list;
            q.answers = AnswerList::entities(std::move(titles));
            q.answer_kind = AnswerKind::entity;
            q.anchors.columns = {*col};
            q.anchors.image_ids = rec.image_ids.empty() ? image_ids : rec.image_ids;
        }
        out.push_back(std::move(q));
    }
    return out;
}

// ---- Text questions --------------------------------------------------------

std::vector<LinkedTriple> link_triples(const std::vector<RCTriple>& triples, const Context& context) {
    std::vector<std::string> titles;
    for (const auto& e : context.entities) titles.push_back(e.title);
    const auto index = build_entity_index(titles);
    std::vector<LinkedTriple> out;
    for (const auto& t : triples) out.push_back(LinkedTriple{t, link_text_question(t, context.table, index)});
    return out;
}

std::vector<AtomicQuestion> ingest_text_questions(const std::vector<LinkedTriple>& linked,
                                                  const std::set<std::string>& corpus_entities,
                                                  IngestReport* report) {
    std::map<std::string, std::string> normalized_entities;
    for (const auto& e : corpus_entities) normalized_entities.emplace(text::normalize_for_match(e), e);

    std::vector<AtomicQuestion> out;
    for (const auto& lt : linked) {
        const RCTriple& t = lt.triple;
        if (lt.links.empty()) {
            if (report) report->skipped.push_back({t.id, "no entity of the table occurs in the question"});
            continue;
        }
        AtomicQuestion q;
        q.id = t.id;
        q.modality = Modality::text;
        q.pl_text = as_question(t.question);

        std::vector<std::string> titles;
        for (const auto& a : t.answers) {
            auto it = normalized_entities.find(text::normalize_for_match(a));
            if (it == normalized_entities.end()) break;
            titles.push_back(it->second);
        }
        if (titles.size() == t.answers.size()) {
            q.answers = AnswerList{t.answers, titles};
            q.answer_kind = AnswerKind::entity;
        } else {
            q.answers = AnswerList::strings(t.answers);
            q.answer_kind = AnswerKind::string;
        }
        for (const auto& p : t.gold_paragraphs) q.anchors.paragraph_ids.push_back(p.id);

        std::set<std::string> seen;
        for (const auto& link : lt.links) {
            q.anchors.cells.push_back(link.table_coords);
            if (!seen.insert(link.entity_title).second) continue;
            q.mentions.push_back(EntityMention{
                link.entity_title, t.question.substr(link.match_span.begin, link.match_span.end - link.match_span.begin)});
        }
        out.push_back(std::move(q));
    }
    return out;
}

} // namespace mmqa
