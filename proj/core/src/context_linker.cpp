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

#include "mmqa/context_linker.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

ImageColumnFeatures image_column_features(const Table& table, std::size_t column,
                                          const ImageColumnModel& model) {
    ImageColumnFeatures f;
    const std::size_t ncols = table.column_count();
    f.left_position = ncols <= 1 ? 1.0
                                 : 1.0 - static_cast<double>(column) / static_cast<double>(ncols - 1);
    const auto header_words = text::words(table.columns.at(column).header);
    for (const auto& kw : model.header_keywords) {
        if (std::find(header_words.begin(), header_words.end(), kw) != header_words.end()) {
            f.header_keyword = 1.0;
            break;
        }
    }
    const std::size_t n = table.row_count();
    if (n == 0) return f;

    std::set<std::string> distinct;
    std::size_t single = 0;
    std::size_t short_cells = 0;
    for (const auto& row : table.rows) {
        const Cell& cell = row.at(column);
        const std::string t = text::trim(cell.text);
        distinct.insert(text::to_lower(t));
        if (cell.links.size() == 1) ++single;
        if (text::utf8_length(t) <= 2) ++short_cells;
    }
    const auto nd = static_cast<double>(n);
    f.uniqueness = static_cast<double>(distinct.size()) / nd;
    f.single_entity = static_cast<double>(single) / nd;
    f.short_text = static_cast<double>(short_cells) / nd;
    return f;
}

std::vector<double> detect_image_column(const Table& table,
                                        const std::vector<std::size_t>& images_by_column,
                                        const ImageColumnModel& model) {
    if (table.column_count() == 0) throw ValidationError("detect_image_column: table has no columns");
    std::vector<double> scores(table.column_count(), 0.0);
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        if (c < images_by_column.size() && images_by_column[c] > 0) continue;
        const auto f = image_column_features(table, c, model);
        const double s = model.w_left_position * f.left_position + model.w_uniqueness * f.uniqueness +
                         model.w_single_entity * f.single_entity + model.w_short_text * f.short_text +
                         model.w_header_keyword * f.header_keyword;
        scores[c] = std::clamp(s, 0.0, 1.0);
    }
    return scores;
}

std::optional<std::size_t> select_image_column(const Table& table,
                                               const std::vector<std::size_t>& images_by_column,
                                               const ImageColumnModel& model) {
    const auto scores = detect_image_column(table, images_by_column, model);
    const auto best = std::max_element(scores.begin(), scores.end());
    if (*best < model.threshold) return std::nullopt;
    return static_cast<std::size_t>(best - scores.begin());
}

std::vector<std::size_t> in_table_images_by_column(const Table& table) {
    std::vector<std::size_t> counts(table.column_count(), 0);
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c].image_id) ++counts[c];
        }
    }
    return counts;
}

std::map<std::string, ImageRef> map_entity_images(const std::vector<WikiEntity>& entities,
                                                  const std::vector<ImageRef>& images,
                                                  const std::set<std::string>& blocklist) {
    std::map<std::string, ImageRef> out;
    std::set<std::string> used_in_table;
    for (const auto& e : entities) {
        if (!e.image_id || blocklist.count(*e.image_id)) continue;
        auto it = std::find_if(images.begin(), images.end(),
                               [&](const ImageRef& im) { return im.id == *e.image_id; });
        if (it == images.end()) continue;
        if (it->source == ImageSource::in_table && !used_in_table.insert(it->id).second) continue;
        out.emplace(e.title, *it);
    }
    return out;
}

EntityIndex build_entity_index(const std::vector<std::string>& titles) {
    EntityIndex index;
    for (const auto& t : titles) index.emplace(t, text::words(t));
    return index;
}

std::vector<LinkResult> link_text_question(const RCTriple& triple, const Table& table,
                                           const EntityIndex& entity_index) {
    const auto tokens = text::tokenize(triple.question);

    std::set<std::string> in_table;
    for (const auto& row : table.rows) {
        for (const auto& cell : row) in_table.insert(cell.links.begin(), cell.links.end());
    }

    struct Candidate {
        std::string title;
        std::size_t first;  // token index
        std::size_t length;
    };
    std::vector<Candidate> candidates;
    for (const auto& title : in_table) {
        auto it = entity_index.find(title);
        const std::vector<std::string> seq = it != entity_index.end() ? it->second : text::words(title);
        if (seq.empty() || seq.size() > tokens.size()) continue;
        for (std::size_t i = 0; i + seq.size() <= tokens.size(); ++i) {
            bool match = true;
            for (std::size_t k = 0; k < seq.size(); ++k) {
                if (tokens[i + k].text != seq[k]) {
                    match = false;
                    break;
                }
            }
            if (match) candidates.push_back({title, i, seq.size()});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.length != b.length) return a.length > b.length;
        if (a.first != b.first) return a.first < b.first;
        return a.title < b.title;
    });

    std::vector<bool> taken(tokens.size(), false);
    std::vector<Candidate> accepted;
    for (const auto& c : candidates) {
        bool overlap = false;
        for (std::size_t k = c.first; k < c.first + c.length; ++k) overlap = overlap || taken[k];
        if (overlap) continue;
        for (std::size_t k = c.first; k < c.first + c.length; ++k) taken[k] = true;
        accepted.push_back(c);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const Candidate& a, const Candidate& b) { return a.first < b.first; });

    std::vector<LinkResult> out;
    std::set<std::pair<std::string, CellCoord>> emitted;
    for (const auto& c : accepted) {
        const CharSpan span{tokens[c.first].begin, tokens[c.first + c.length - 1].end};
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            for (std::size_t col = 0; col < table.column_count(); ++col) {
                const auto& links = table.rows[r][col].links;
                if (std::find(links.begin(), links.end(), c.title) == links.end()) continue;
                const CellCoord coord{r, col};
                if (!emitted.insert({c.title, coord}).second) continue;
                out.push_back(LinkResult{c.title, coord, span});
            }
        }
    }
    return out;
}

std::vector<ColumnCellInfo> column_cell_info(const Context& context, std::size_t column,
                                             const std::set<std::string>& blocklist) {
    const auto images = map_entity_images(context.entities, context.images, blocklist);
    std::vector<ColumnCellInfo> out;
    for (const auto& row : context.table.rows) {
        const Cell& cell = row.at(column);
        ColumnCellInfo info;
        if (!cell.links.empty()) {
            info.entity = cell.links.front();
            auto it = images.find(cell.links.front());
            if (it != images.end()) info.image_id = it->second.id;
        }
        if (!info.image_id && cell.image_id && !blocklist.count(*cell.image_id)) info.image_id = cell.image_id;
        out.push_back(std::move(info));
    }
    return out;
}

bool eligible_image_list_column(const std::vector<ColumnCellInfo>& cells) {
    std::set<std::string> entities;
    std::set<std::string> imageless;
    std::map<std::string, std::size_t> image_uses;
    for (const auto& c : cells) {
        if (c.entity) {
            entities.insert(*c.entity);
            if (!c.image_id) imageless.insert(*c.entity);
        }
        if (c.image_id) ++image_uses[*c.image_id];
    }
    std::size_t duplicated_cells = 0;
    for (const auto& [id, n] : image_uses) {
        if (n > 1) duplicated_cells += n;
    }
    return entities.size() >= 4 && duplicated_cells <= 3 && imageless.size() <= 2;
}

std::string_view to_string(RcSource source) {
    switch (source) {
    case RcSource::nq: return "nq";
    case RcSource::boolq: return "boolq";
    case RcSource::hotpotqa: return "hotpotqa";
    case RcSource::other: return "other";
    }
    return "other";
}

RcSource rc_source_from_string(std::string_view name) {
    if (name == "nq") return RcSource::nq;
    if (name == "boolq") return RcSource::boolq;
    if (name == "hotpotqa") return RcSource::hotpotqa;
    if (name == "other") return RcSource::other;
    throw SchemaError("unknown RC source '" + std::string(name) + "'");
}

RCTriple parse_rc_triple(const json& rec, std::size_t line_number) {
    const std::string where = "rc triple line " + std::to_string(line_number);
    if (!rec.is_object()) throw SchemaError(where + ": expected an object");
    RCTriple t;
    t.id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                        : "rc-" + std::to_string(line_number);
    if (!rec.contains("question") || !rec["question"].is_string()) throw SchemaError(where + ": missing 'question'");
    t.question = rec["question"].get<std::string>();
    if (!rec.contains("answers") || !rec["answers"].is_array()) throw SchemaError(where + ": missing 'answers'");
    for (const auto& a : rec["answers"]) {
        if (!a.is_string()) throw SchemaError(where + ": answers must be strings");
        t.answers.push_back(a.get<std::string>());
    }
    if (t.answers.empty()) throw ValidationError(where + ": answers must be non-empty");
    if (!rec.contains("gold_paragraphs") || !rec["gold_paragraphs"].is_array()) {
        throw SchemaError(where + ": missing 'gold_paragraphs'");
    }
    for (const auto& p : rec["gold_paragraphs"]) {
        if (!p.is_object() || !p.contains("id") || !p.contains("text")) {
            throw SchemaError(where + ": gold paragraph needs 'id' and 'text'");
        }
        Paragraph para;
        para.id = p["id"].get<std::string>();
        para.article_title = p.value("article_title", "");
        para.text = p["text"].get<std::string>();
        para.role = Role::gold;
        if (para.text.empty()) throw ValidationError(where + ": empty gold paragraph");
        t.gold_paragraphs.push_back(std::move(para));
    }
    if (t.gold_paragraphs.empty() || t.gold_paragraphs.size() > 2) {
        throw ValidationError(where + ": expected 1-2 gold paragraphs");
    }
    t.source = rc_source_from_string(rec.value("source", "other"));
    return t;
}

std::vector<RCTriple> read_rc_triples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open RC triples file " + path.string());
    std::vector<RCTriple> out;
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
        out.push_back(parse_rc_triple(rec, n));
    }
    return out;
}

std::set<std::string> read_blocklist(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open blocklist " + path.string());
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = text::trim(line);
        if (!t.empty() && t.front() != '#') out.insert(std::move(t));
    }
    return out;
}

} // namespace mmqa
