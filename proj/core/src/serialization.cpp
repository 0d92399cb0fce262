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

#include "mmqa/serialization.hpp"

#include "mmqa/errors.hpp"

namespace mmqa {

using nlohmann::json;

namespace {

json opt(const std::optional<std::string>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<std::string> opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

template <typename T>
std::optional<T> opt_value(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

// Runs `f`, turning nlohmann exceptions into SchemaError.
template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

} // namespace

json to_json(const AnswerList& a) {
    return json{{"values", a.values}, {"entity_titles", a.entity_titles ? json(*a.entity_titles) : json(nullptr)}};
}

AnswerList answer_list_from_json(const json& j) {
    return guarded("answer list", [&] {
        AnswerList a;
        a.values = j.at("values").get<std::vector<std::string>>();
        a.entity_titles = opt_value<std::vector<std::string>>(j, "entity_titles");
        validate_answers(a);
        return a;
    });
}

json to_json(const AtomicQuestion& q) {
    json cells = json::array();
    for (const auto& c : q.anchors.cells) cells.push_back(json::array({c.row, c.column}));
    json predicate = nullptr;
    if (q.predicate) {
        const auto& p = *q.predicate;
        predicate = json{{"target_column", p.target_column},
                         {"condition_column", p.condition_column ? json(*p.condition_column) : json(nullptr)},
                         {"condition_value", opt(p.condition_value)},
                         {"superlative", p.superlative ? json(to_string(*p.superlative)) : json(nullptr)}};
    }
    json mentions = json::array();
    for (const auto& m : q.mentions) mentions.push_back(json{{"title", m.title}, {"surface", m.surface}});
    return json{{"id", q.id},
                {"modality", to_string(q.modality)},
                {"pl_text", q.pl_text},
                {"answers", to_json(q.answers)},
                {"answer_kind", to_string(q.answer_kind)},
                {"anchors",
                 {{"cells", std::move(cells)},
                  {"columns", q.anchors.columns},
                  {"paragraph_ids", q.anchors.paragraph_ids},
                  {"image_ids", q.anchors.image_ids}}},
                {"predicate", std::move(predicate)},
                {"mentions", std::move(mentions)}};
}

AtomicQuestion atomic_from_json(const json& j) {
    return guarded("atomic question", [&] {
        AtomicQuestion q;
        q.id = j.at("id").get<std::string>();
        q.modality = modality_from_string(j.at("modality").get<std::string>());
        q.pl_text = j.at("pl_text").get<std::string>();
        q.answers = answer_list_from_json(j.at("answers"));
        q.answer_kind = answer_kind_from_string(j.at("answer_kind").get<std::string>());
        const json& a = j.at("anchors");
        for (const auto& c : a.at("cells")) q.anchors.cells.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>()});
        q.anchors.columns = a.at("columns").get<std::vector<std::size_t>>();
        q.anchors.paragraph_ids = a.at("paragraph_ids").get<std::vector<std::string>>();
        q.anchors.image_ids = a.at("image_ids").get<std::vector<std::string>>();
        if (auto it = j.find("predicate"); it != j.end() && !it->is_null()) {
            TablePredicate p;
            p.target_column = it->at("target_column").get<std::size_t>();
            p.condition_column = opt_value<std::size_t>(*it, "condition_column");
            p.condition_value = opt_string(*it, "condition_value");
            if (auto s = opt_string(*it, "superlative")) p.superlative = extremum_from_string(*s);
            q.predicate = p;
        }
        for (const auto& m : j.at("mentions")) {
            q.mentions.push_back({m.at("title").get<std::string>(), m.at("surface").get<std::string>()});
        }
        return q;
    });
}

json to_json(const Program& p) {
    json children = json::array();
    for (const auto& c : p.children) children.push_back(to_json(c));
    return json{{"op", to_string(p.op)},
                {"question_type", p.question_type},
                {"question", p.atomic ? to_json(*p.atomic) : json(nullptr)},
                {"children", std::move(children)},
                {"compare_column", p.compare_column ? json(*p.compare_column) : json(nullptr)},
                {"compare_op", p.compare_op ? json(to_string(*p.compare_op)) : json(nullptr)}};
}

Program program_from_json(const json& j) {
    return guarded("program", [&] {
        Program p;
        p.op = operation_from_string(j.at("op").get<std::string>());
        p.question_type = j.value("question_type", "");
        if (auto it = j.find("question"); it != j.end() && !it->is_null()) p.atomic = atomic_from_json(*it);
        for (const auto& c : j.at("children")) p.children.push_back(program_from_json(c));
        p.compare_column = opt_value<std::size_t>(j, "compare_column");
        if (auto s = opt_string(j, "compare_op")) p.compare_op = extremum_from_string(*s);
        const std::size_t arity = p.op == Operation::atomic ? 0 : 2;
        if (p.children.size() != arity) throw SchemaError("program node '" + std::string(to_string(p.op)) +
                                                          "' has " + std::to_string(p.children.size()) + " children");
        if (p.op == Operation::atomic && !p.atomic) throw SchemaError("atomic program node without a question");
        return p;
    });
}

json to_json(const Paragraph& p) {
    return json{{"id", p.id}, {"article_title", p.article_title}, {"text", p.text}, {"role", to_string(p.role)}};
}

Paragraph paragraph_from_json(const json& j) {
    return guarded("paragraph", [&] {
        return Paragraph{j.at("id").get<std::string>(), j.at("article_title").get<std::string>(),
                         j.at("text").get<std::string>(), role_from_string(j.value("role", "unassigned"))};
    });
}

json to_json(const ImageRef& im) {
    return json{{"id", im.id}, {"entity_title", opt(im.entity_title)}, {"source", to_string(im.source)}, {"uri", im.uri}};
}

ImageRef image_from_json(const json& j) {
    return guarded("image", [&] {
        return ImageRef{j.at("id").get<std::string>(), opt_string(j, "entity_title"),
                        image_source_from_string(j.at("source").get<std::string>()), j.value("uri", "")};
    });
}

json to_json(const Table& t) {
    json cols = json::array();
    for (const auto& c : t.columns) cols.push_back(json{{"header", c.header}, {"semantic_type", to_string(c.semantic_type)}});
    json rows = json::array();
    for (const auto& row : t.rows) {
        json jr = json::array();
        for (const auto& cell : row) jr.push_back(json{{"text", cell.text}, {"links", cell.links}, {"image", opt(cell.image_id)}});
        rows.push_back(std::move(jr));
    }
    return json{{"page_title", t.page_title}, {"table_title", t.table_title}, {"columns", std::move(cols)}, {"rows", std::move(rows)}};
}

Table table_from_json(const json& j) {
    return guarded("table", [&] {
        Table t;
        t.page_title = j.at("page_title").get<std::string>();
        t.table_title = j.at("table_title").get<std::string>();
        for (const auto& c : j.at("columns")) {
            t.columns.push_back(Column{c.at("header").get<std::string>(),
                                       semantic_type_from_string(c.at("semantic_type").get<std::string>()),
                                       t.columns.size()});
        }
        for (const auto& r : j.at("rows")) {
            std::vector<Cell> row;
            for (const auto& c : r) {
                row.push_back(Cell{c.at("text").get<std::string>(), c.at("links").get<std::vector<std::string>>(),
                                   opt_string(c, "image")});
            }
            if (row.size() != t.columns.size()) throw ValidationError("ragged table row");
            t.rows.push_back(std::move(row));
        }
        return t;
    });
}

json to_json(const AssembledContext& c) {
    json paragraphs = json::array();
    for (const auto& p : c.paragraphs) paragraphs.push_back(to_json(p));
    json images = json::array();
    for (const auto& im : c.images) images.push_back(to_json(im));
    return json{{"context_id", c.context_id},
                {"table", to_json(c.table)},
                {"paragraphs", std::move(paragraphs)},
                {"images", std::move(images)},
                {"gold_image_ids", c.gold_image_ids}};
}

AssembledContext assembled_context_from_json(const json& j) {
    return guarded("context", [&] {
        AssembledContext c;
        c.context_id = j.at("context_id").get<std::string>();
        c.table = table_from_json(j.at("table"));
        for (const auto& p : j.at("paragraphs")) c.paragraphs.push_back(paragraph_from_json(p));
        for (const auto& im : j.at("images")) c.images.push_back(image_from_json(im));
        c.gold_image_ids = j.at("gold_image_ids").get<std::vector<std::string>>();
        return c;
    });
}

json to_json(const Example& e) {
    return json{{"qid", e.qid},
                {"pl_question", e.pl_question},
                {"nl_question", opt(e.nl_question)},
                {"program", to_json(e.program)},
                {"question_type", e.question_type},
                {"answers", to_json(e.answers)},
                {"intermediate_answers", e.intermediate_answers ? to_json(*e.intermediate_answers) : json(nullptr)},
                {"context", to_json(e.context)},
                {"split", e.split ? json(to_string(*e.split)) : json(nullptr)},
                {"multimodal", e.multimodal},
                {"compositional", e.compositional},
                {"feedback_checker", opt(e.feedback_checker)}};
}

Example example_from_json(const json& j) {
    return guarded("example", [&] {
        if (!j.is_object()) throw SchemaError("example must be a JSON object");
        Example e;
        e.qid = j.at("qid").get<std::string>();
        e.pl_question = j.at("pl_question").get<std::string>();
        e.nl_question = opt_string(j, "nl_question");
        e.program = program_from_json(j.at("program"));
        e.question_type = j.at("question_type").get<std::string>();
        e.answers = answer_list_from_json(j.at("answers"));
        if (auto it = j.find("intermediate_answers"); it != j.end() && !it->is_null()) {
            e.intermediate_answers = answer_list_from_json(*it);
        }
        e.context = assembled_context_from_json(j.at("context"));
        if (auto s = opt_string(j, "split")) e.split = split_from_string(*s);
        e.multimodal = j.at("multimodal").get<bool>();
        e.compositional = j.at("compositional").get<bool>();
        e.feedback_checker = opt_string(j, "feedback_checker");
        return e;
    });
}

} // namespace mmqa
