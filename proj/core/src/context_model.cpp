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

#include "mmqa/context_model.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

// ---- Table / Context helpers ------------------------------------------------

std::vector<std::string> Table::column_texts(std::size_t column) const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.at(column).text);
    return out;
}

std::optional<std::size_t> Table::find_column(std::string_view header) const {
    for (const auto& c : columns) {
        if (text::iequals(c.header, header)) return c.position;
    }
    return std::nullopt;
}

std::vector<std::size_t> Table::rows_linking(std::string_view title) const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const auto& cell : rows[r]) {
            if (std::find(cell.links.begin(), cell.links.end(), title) != cell.links.end()) {
                out.push_back(r);
                break;
            }
        }
    }
    return out;
}

const WikiEntity* Context::find_entity(std::string_view title) const {
    for (const auto& e : entities) {
        if (e.title == title) return &e;
    }
    return nullptr;
}

const ImageRef* Context::find_image(std::string_view image_id) const {
    for (const auto& i : images) {
        if (i.id == image_id) return &i;
    }
    return nullptr;
}

std::vector<std::string> Context::table_entities() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& row : table.rows) {
        for (const auto& cell : row) {
            for (const auto& link : cell.links) {
                if (seen.insert(link).second) out.push_back(link);
            }
        }
    }
    return out;
}

std::vector<std::string> Context::reachable_image_ids() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto add = [&](const std::string& id) {
        if (seen.insert(id).second) out.push_back(id);
    };
    for (const auto& row : table.rows) {
        for (const auto& cell : row) {
            if (cell.image_id) add(*cell.image_id);
            for (const auto& link : cell.links) {
                const auto* e = find_entity(link);
                if (e && e->image_id) add(*e->image_id);
            }
        }
    }
    return out;
}

// ---- Value parsing ---------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december"};

std::optional<unsigned> parse_month(std::string_view word) {
    const std::string w = text::to_lower(word);
    for (std::size_t i = 0; i < kMonths.size(); ++i) {
        if (w == kMonths[i]) return static_cast<unsigned>(i + 1);
        if (w.size() == 3 && kMonths[i].substr(0, 3) == w) return static_cast<unsigned>(i + 1);
    }
    if (w == "sept") return 9U;
    return std::nullopt;
}

std::optional<int> parse_uint(std::string_view s, std::size_t min_digits, std::size_t max_digits) {
    if (s.size() < min_digits || s.size() > max_digits) return std::nullopt;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

std::optional<Date> make_date(int y, unsigned m, unsigned d) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) return std::nullopt;
    return Date{y, m, d};
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ') ++i;
        if (i > b) parts.push_back(s.substr(b, i - b));
    }
    return parts;
}

} // namespace

bool is_bare_year(std::string_view input) {
    const std::string t = text::trim(input);
    return parse_uint(t, 4, 4).has_value();
}

std::optional<Date> parse_date(std::string_view input) {
    const std::string t = text::collapse_whitespace(text::trim(input));
    if (t.empty()) return std::nullopt;

    if (auto y = parse_uint(t, 4, 4)) return Date{*y, 1, 1};

    // YYYY-MM-DD
    if (t.size() == 10 && t[4] == '-' && t[7] == '-') {
        auto y = parse_uint(std::string_view(t).substr(0, 4), 4, 4);
        auto m = parse_uint(std::string_view(t).substr(5, 2), 2, 2);
        auto d = parse_uint(std::string_view(t).substr(8, 2), 2, 2);
        if (y && m && d) return make_date(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
        return std::nullopt;
    }

    const auto parts = split_ws(t);
    if (parts.size() != 3) return std::nullopt;

    // Month D, YYYY
    if (auto m = parse_month(parts[0])) {
        std::string_view day = parts[1];
        if (!day.empty() && day.back() == ',') day.remove_suffix(1);
        auto d = parse_uint(day, 1, 2);
        auto y = parse_uint(parts[2], 4, 4);
        if (d && y) return make_date(*y, *m, static_cast<unsigned>(*d));
        return std::nullopt;
    }
    // D Month YYYY
    if (auto d = parse_uint(parts[0], 1, 2)) {
        auto m = parse_month(parts[1]);
        auto y = parse_uint(parts[2], 4, 4);
        if (m && y) return make_date(*y, *m, static_cast<unsigned>(*d));
    }
    return std::nullopt;
}

std::optional<double> parse_number(std::string_view input) {
    std::string t = text::trim(input);
    if (t.empty()) return std::nullopt;

    bool negative = false;
    std::size_t i = 0;
    if (t[i] == '-' || t[i] == '+') {
        negative = t[i] == '-';
        ++i;
    }
    // One leading currency symbol: $, or the UTF-8 encodings of €, £, ¥.
    static constexpr std::array<std::string_view, 4> kCurrency = {"$", "\xE2\x82\xAC", "\xC2\xA3", "\xC2\xA5"};
    for (auto sym : kCurrency) {
        if (std::string_view(t).substr(i, sym.size()) == sym) {
            i += sym.size();
            break;
        }
    }
    if (i < t.size() && !negative && t[i] == '-') {
        negative = true;
        ++i;
    }

    std::string digits;
    std::size_t group_len = 0;
    bool seen_comma = false;
    bool in_fraction = false;
    std::size_t int_digits = 0;
    for (; i < t.size(); ++i) {
        const char c = t[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (!in_fraction) {
                ++group_len;
                ++int_digits;
            }
        } else if (c == ',' && !in_fraction) {
            if (int_digits == 0) return std::nullopt;
            if (seen_comma ? group_len != 3 : group_len > 3) return std::nullopt;
            seen_comma = true;
            group_len = 0;
        } else if (c == '.' && !in_fraction) {
            if (seen_comma && group_len != 3) return std::nullopt;
            in_fraction = true;
            digits.push_back('.');
        } else {
            return std::nullopt;
        }
    }
    if (seen_comma && !in_fraction && group_len != 3) return std::nullopt;
    if (int_digits == 0) return std::nullopt;
    if (in_fraction && digits.back() == '.') return std::nullopt;

    const double v = std::stod(digits);
    return negative ? -v : v;
}

std::optional<double> ordering_key(SemanticType type, std::string_view value) {
    switch (type) {
    case SemanticType::date: {
        auto d = parse_date(value);
        if (!d) return std::nullopt;
        using namespace std::chrono;
        const sys_days days{year_month_day{year{d->year}, month{d->month}, day{d->day}}};
        return static_cast<double>(days.time_since_epoch().count());
    }
    case SemanticType::numeric:
    case SemanticType::index:
        return parse_number(value);
    case SemanticType::text:
        return std::nullopt;
    }
    return std::nullopt;
}

SemanticType classify_column(const std::vector<std::string>& cells) {
    std::vector<std::string> values;
    for (const auto& c : cells) {
        std::string t = text::trim(c);
        if (!t.empty()) values.push_back(std::move(t));
    }
    if (values.empty()) return SemanticType::text;

    const bool all_dates = std::all_of(values.begin(), values.end(),
                                       [](const std::string& v) { return parse_date(v).has_value(); });
    const bool all_years = std::all_of(values.begin(), values.end(),
                                       [](const std::string& v) { return is_bare_year(v); });
    if (all_dates && !all_years) return SemanticType::date;

    std::vector<double> numbers;
    for (const auto& v : values) {
        auto n = parse_number(v);
        if (!n) return SemanticType::text;
        numbers.push_back(*n);
    }
    bool consecutive = true;
    for (std::size_t i = 0; i < numbers.size(); ++i) {
        if (numbers[i] != numbers.front() + static_cast<double>(i) ||
            numbers[i] != static_cast<double>(static_cast<long long>(numbers[i]))) {
            consecutive = false;
            break;
        }
    }
    return consecutive ? SemanticType::index : SemanticType::numeric;
}

bool is_year_valued(const Table& table, std::size_t column) {
    const auto& col = table.columns.at(column);
    if (col.semantic_type != SemanticType::numeric && col.semantic_type != SemanticType::index) return false;
    bool any = false;
    for (const auto& row : table.rows) {
        const std::string t = text::trim(row.at(column).text);
        if (t.empty()) continue;
        if (!is_bare_year(t)) return false;
        any = true;
    }
    return any;
}

bool filter_table(const Context& context, const TableFilter& filter) {
    const std::size_t n = context.table.row_count();
    if (n < filter.min_rows || n > filter.max_rows) return false;
    return context.reachable_image_ids().size() >= filter.min_images;
}

std::string linearize_table(const Table& table) {
    std::string out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (r) out += ' ';
        out += "Row " + std::to_string(r + 1) + ": ";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += "; ";
            out += text::to_lower(table.columns[c].header);
            out += " is ";
            out += table.rows[r][c].text;
        }
        out += '.';
    }
    return out;
}

// ---- Enum names ------------------------------------------------------------

std::string_view to_string(SemanticType type) {
    switch (type) {
    case SemanticType::date: return "date";
    case SemanticType::numeric: return "numeric";
    case SemanticType::index: return "index";
    case SemanticType::text: return "text";
    }
    return "text";
}

std::string_view to_string(Role role) {
    switch (role) {
    case Role::gold: return "gold";
    case Role::distractor: return "distractor";
    case Role::unassigned: return "unassigned";
    }
    return "unassigned";
}

std::string_view to_string(ImageSource source) {
    return source == ImageSource::in_table ? "in_table" : "entity_page";
}

SemanticType semantic_type_from_string(std::string_view name) {
    if (name == "date") return SemanticType::date;
    if (name == "numeric") return SemanticType::numeric;
    if (name == "index") return SemanticType::index;
    if (name == "text") return SemanticType::text;
    throw SchemaError("unknown semantic_type '" + std::string(name) + "'");
}

Role role_from_string(std::string_view name) {
    if (name == "gold") return Role::gold;
    if (name == "distractor") return Role::distractor;
    if (name == "unassigned") return Role::unassigned;
    throw SchemaError("unknown role '" + std::string(name) + "'");
}

ImageSource image_source_from_string(std::string_view name) {
    if (name == "in_table") return ImageSource::in_table;
    if (name == "entity_page") return ImageSource::entity_page;
    throw SchemaError("unknown image source '" + std::string(name) + "'");
}

// ---- Parsing ---------------------------------------------------------------

namespace {

const json& require(const json& obj, const char* key, json::value_t kind, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
    const bool ok = kind == json::value_t::number_unsigned ? it->is_number_unsigned()
                    : kind == json::value_t::string        ? it->is_string()
                    : kind == json::value_t::array         ? it->is_array()
                    : kind == json::value_t::object        ? it->is_object()
                                                           : true;
    if (!ok) throw SchemaError(where + ": field '" + key + "' has the wrong kind");
    return *it;
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(where + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

Cell parse_cell(const json& j, const std::string& where) {
    if (j.is_string()) return Cell{j.get<std::string>(), {}, std::nullopt};
    Cell cell;
    cell.text = require(j, "text", json::value_t::string, where).get<std::string>();
    if (auto it = j.find("links"); it != j.end()) {
        if (!it->is_array()) throw SchemaError(where + ": field 'links' must be an array");
        for (const auto& l : *it) {
            if (!l.is_string()) throw SchemaError(where + ": links must be strings");
            cell.links.push_back(l.get<std::string>());
        }
    }
    cell.image_id = optional_string(j, "image", where);
    return cell;
}

} // namespace

Context parse_context(const json& doc) {
    if (!doc.is_object()) throw SchemaError("context: document must be a JSON object");
    Context ctx;
    ctx.id = optional_string(doc, "id", "context").value_or("");

    const json& t = require(doc, "table", json::value_t::object, "context");
    ctx.table.page_title = require(t, "page_title", json::value_t::string, "table").get<std::string>();
    ctx.table.table_title = require(t, "table_title", json::value_t::string, "table").get<std::string>();
    const json& cols = require(t, "columns", json::value_t::array, "table");
    std::vector<std::optional<SemanticType>> declared;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::string where = "table.columns[" + std::to_string(i) + "]";
        Column c;
        c.position = i;
        if (cols[i].is_string()) {
            c.header = cols[i].get<std::string>();
            declared.emplace_back();
        } else {
            c.header = require(cols[i], "header", json::value_t::string, where).get<std::string>();
            auto st = optional_string(cols[i], "semantic_type", where);
            declared.push_back(st ? std::optional(semantic_type_from_string(*st)) : std::nullopt);
        }
        ctx.table.columns.push_back(std::move(c));
    }
    const json& rows = require(t, "rows", json::value_t::array, "table");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = "table.rows[" + std::to_string(r) + "]";
        if (!rows[r].is_array()) throw SchemaError(where + ": expected an array of cells");
        if (rows[r].size() != ctx.table.columns.size()) {
            throw ValidationError(where + ": ragged row with " + std::to_string(rows[r].size()) +
                                  " cells, expected " + std::to_string(ctx.table.columns.size()));
        }
        std::vector<Cell> row;
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            row.push_back(parse_cell(rows[r][c], where + "[" + std::to_string(c) + "]"));
        }
        ctx.table.rows.push_back(std::move(row));
    }
    for (std::size_t c = 0; c < ctx.table.columns.size(); ++c) {
        ctx.table.columns[c].semantic_type =
            declared[c] ? *declared[c] : classify_column(ctx.table.column_texts(c));
    }

    if (auto it = doc.find("paragraphs"); it != doc.end()) {
        if (!it->is_array()) throw SchemaError("context: 'paragraphs' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "paragraphs[" + std::to_string(i) + "]";
            const json& p = (*it)[i];
            Paragraph para;
            para.id = require(p, "id", json::value_t::string, where).get<std::string>();
            para.article_title = require(p, "article_title", json::value_t::string, where).get<std::string>();
            para.text = require(p, "text", json::value_t::string, where).get<std::string>();
            para.role = role_from_string(optional_string(p, "role", where).value_or("unassigned"));
            ctx.paragraphs.push_back(std::move(para));
        }
    }
    if (auto it = doc.find("images"); it != doc.end()) {
        if (!it->is_array()) throw SchemaError("context: 'images' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "images[" + std::to_string(i) + "]";
            const json& im = (*it)[i];
            ImageRef ref;
            ref.id = require(im, "id", json::value_t::string, where).get<std::string>();
            ref.entity_title = optional_string(im, "entity_title", where);
            ref.source = image_source_from_string(require(im, "source", json::value_t::string, where).get<std::string>());
            ref.uri = optional_string(im, "uri", where).value_or("");
            ctx.images.push_back(std::move(ref));
        }
    }
    if (auto it = doc.find("entities"); it != doc.end()) {
        if (!it->is_array()) throw SchemaError("context: 'entities' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const std::string where = "entities[" + std::to_string(i) + "]";
            WikiEntity e;
            e.title = require((*it)[i], "title", json::value_t::string, where).get<std::string>();
            e.image_id = optional_string((*it)[i], "image", where);
            ctx.entities.push_back(std::move(e));
        }
    }

    validate_context(ctx);
    return ctx;
}

void validate_context(const Context& ctx) {
    const Table& t = ctx.table;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (t.columns[c].position != c) throw ValidationError("column positions must be contiguous from 0");
        const SemanticType declared = t.columns[c].semantic_type;
        if (declared == SemanticType::text) continue;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const std::string v = text::trim(t.rows[r].at(c).text);
            if (!v.empty() && !ordering_key(declared, v)) {
                throw ValidationError("column '" + t.columns[c].header + "' declared " +
                                      std::string(to_string(declared)) + " but cell '" + v +
                                      "' does not parse");
            }
        }
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != t.columns.size()) {
            throw ValidationError("row " + std::to_string(r) + " is ragged");
        }
    }

    std::set<std::string> titles;
    for (const auto& e : ctx.entities) {
        if (e.title.empty()) throw ValidationError("entity with empty title");
        if (!titles.insert(e.title).second) throw ValidationError("duplicate entity '" + e.title + "'");
    }
    std::set<std::string> image_ids;
    for (const auto& im : ctx.images) {
        if (im.id.empty()) throw ValidationError("image with empty id");
        if (!image_ids.insert(im.id).second) throw ValidationError("duplicate image id '" + im.id + "'");
        if (im.entity_title && !titles.count(*im.entity_title)) {
            throw ReferenceError("image '" + im.id + "' references unknown entity '" + *im.entity_title + "'");
        }
    }
    for (const auto& e : ctx.entities) {
        if (e.image_id && !image_ids.count(*e.image_id)) {
            throw ReferenceError("entity '" + e.title + "' references unknown image '" + *e.image_id + "'");
        }
    }

    std::map<std::string, std::size_t> in_table_uses;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            const Cell& cell = t.rows[r][c];
            for (const auto& link : cell.links) {
                if (!titles.count(link)) {
                    throw ReferenceError("cell (" + std::to_string(r) + ", " + std::to_string(c) +
                                         ") links unknown entity '" + link + "'");
                }
            }
            if (cell.image_id) {
                const ImageRef* im = ctx.find_image(*cell.image_id);
                if (!im) {
                    throw ReferenceError("cell (" + std::to_string(r) + ", " + std::to_string(c) +
                                         ") references unknown image '" + *cell.image_id + "'");
                }
                if (im->source != ImageSource::in_table) {
                    throw ValidationError("cell image '" + im->id + "' must have source in_table");
                }
                ++in_table_uses[im->id];
            }
        }
    }
    for (const auto& im : ctx.images) {
        if (im.source != ImageSource::in_table) continue;
        auto it = in_table_uses.find(im.id);
        if (it == in_table_uses.end()) {
            throw ValidationError("in_table image '" + im.id + "' is not anchored to any cell");
        }
        if (it->second > 1) {
            throw ValidationError("in_table image '" + im.id + "' is anchored to more than one cell");
        }
    }

    std::set<std::string> para_ids;
    for (const auto& p : ctx.paragraphs) {
        if (p.text.empty()) throw ValidationError("paragraph '" + p.id + "' has empty text");
        if (!para_ids.insert(p.id).second) throw ValidationError("duplicate paragraph id '" + p.id + "'");
    }
}

Context load_context(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open context file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
    Context ctx = parse_context(doc);
    if (ctx.id.empty()) {
        std::string stem = path.filename().string();
        if (auto pos = stem.find('.'); pos != std::string::npos) stem = stem.substr(0, pos);
        ctx.id = stem;
    }
    return ctx;
}

json context_to_json(const Context& ctx) {
    json cols = json::array();
    for (const auto& c : ctx.table.columns) {
        cols.push_back(json::object({{"header", c.header}, {"semantic_type", to_string(c.semantic_type)}}));
    }
    json rows = json::array();
    for (const auto& row : ctx.table.rows) {
        json jr = json::array();
        for (const auto& cell : row) {
            json jc = json::object();
            jc["text"] = cell.text;
            jc["links"] = cell.links;
            jc["image"] = cell.image_id ? json(*cell.image_id) : json(nullptr);
            jr.push_back(std::move(jc));
        }
        rows.push_back(std::move(jr));
    }
    json paragraphs = json::array();
    for (const auto& p : ctx.paragraphs) {
        paragraphs.push_back(json::object({{"id", p.id},
                                           {"article_title", p.article_title},
                                           {"text", p.text},
                                           {"role", to_string(p.role)}}));
    }
    json images = json::array();
    for (const auto& im : ctx.images) {
        images.push_back(json::object({{"id", im.id},
                                       {"entity_title", im.entity_title ? json(*im.entity_title) : json(nullptr)},
                                       {"source", to_string(im.source)},
                                       {"uri", im.uri}}));
    }
    json entities = json::array();
    for (const auto& e : ctx.entities) {
        entities.push_back(json::object({{"title", e.title}, {"image", e.image_id ? json(*e.image_id) : json(nullptr)}}));
    }
    json table = json::object({{"page_title", ctx.table.page_title},
                               {"table_title", ctx.table.table_title},
                               {"columns", std::move(cols)},
                               {"rows", std::move(rows)}});
    return json::object({{"id", ctx.id},
                         {"table", std::move(table)},
                         {"paragraphs", std::move(paragraphs)},
                         {"images", std::move(images)},
                         {"entities", std::move(entities)}});
}

} // namespace mmqa
