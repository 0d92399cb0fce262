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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mmqa {

enum class ImageSource { in_table, entity_page };

// Paragraph and image roles inside an assembled context.
enum class Role { gold, distractor, unassigned };

enum class SemanticType { date, numeric, index, text };

struct CellCoord {
    std::size_t row = 0;
    std::size_t column = 0;
    auto operator<=>(const CellCoord&) const = default;
};

struct ImageRef {
    std::string id;
    std::optional<std::string> entity_title;
    ImageSource source = ImageSource::entity_page;
    std::string uri;
    bool operator==(const ImageRef&) const = default;
};

struct WikiEntity {
    std::string title;
    std::optional<std::string> image_id;
    bool operator==(const WikiEntity&) const = default;
};

struct Cell {
    std::string text;
    std::vector<std::string> links;        // WikiEntity titles
    std::optional<std::string> image_id;   // in-table image
    bool operator==(const Cell&) const = default;
};

struct Column {
    std::string header;
    SemanticType semantic_type = SemanticType::text;
    std::size_t position = 0;
    bool operator==(const Column&) const = default;
};

struct Table {
    std::string page_title;
    std::string table_title;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t row_count() const { return rows.size(); }
    std::size_t column_count() const { return columns.size(); }
    const Cell& cell(std::size_t row, std::size_t column) const { return rows.at(row).at(column); }
    std::vector<std::string> column_texts(std::size_t column) const;
    // Case-insensitive header lookup.
    std::optional<std::size_t> find_column(std::string_view header) const;
    // Rows whose cells link `title` anywhere in the row.
    std::vector<std::size_t> rows_linking(std::string_view title) const;
    bool operator==(const Table&) const = default;
};

struct Paragraph {
    std::string id;
    std::string article_title;
    std::string text;
    Role role = Role::unassigned;
    bool operator==(const Paragraph&) const = default;
};

struct Context {
    std::string id;
    Table table;
    std::vector<Paragraph> paragraphs;
    std::vector<ImageRef> images;
    std::vector<WikiEntity> entities;

    const WikiEntity* find_entity(std::string_view title) const;
    const ImageRef* find_image(std::string_view id) const;
    // Distinct titles linked from table cells, in row-major order of first use.
    std::vector<std::string> table_entities() const;
    // In-table images plus images of entities linked from the table, deduplicated.
    std::vector<std::string> reachable_image_ids() const;
    bool operator==(const Context&) const = default;
};

struct Date {
    int year = 0;
    unsigned month = 1;
    unsigned day = 1;
    auto operator<=>(const Date&) const = default;
};

// Accepted: "YYYY-MM-DD", "Month D, YYYY", "D Month YYYY", bare "YYYY"
// (as January 1). Month names may be full or three-letter abbreviations.
std::optional<Date> parse_date(std::string_view text);

// Optional sign, one leading currency symbol, thousands separators in groups
// of three, optional decimal part. Anything else is rejected.
std::optional<double> parse_number(std::string_view text);

bool is_bare_year(std::string_view text);

// Ordering key for a cell under a column type: days since epoch for dates,
// the value itself for numeric/index columns. Empty for text or unparsable cells.
std::optional<double> ordering_key(SemanticType type, std::string_view text);

// date when every non-empty cell parses as a date and at least one is not a
// bare year; numeric when every non-empty cell parses as a number; index when
// numeric and the values run first, first+1, first+2, ...; text otherwise
// (including all-empty columns).
SemanticType classify_column(const std::vector<std::string>& cells);

// Numeric column holding only four-digit years; rendered with temporal
// vocabulary ("MOST RECENT", "EARLIEST").
bool is_year_valued(const Table& table, std::size_t column);

struct TableFilter {
    std::size_t min_rows = 10;
    std::size_t max_rows = 25;
    std::size_t min_images = 3;
};

bool filter_table(const Context& context, const TableFilter& filter = {});

// "Row 1: year is 1957; title is a dangerous age; role is David. Row 2: ..."
// Headers are lowercased, cell text is kept as stored.
std::string linearize_table(const Table& table);

// Validates and resolves a context document. Column semantic types are
// computed when the document omits them.
Context parse_context(const nlohmann::json& document);
Context load_context(const std::filesystem::path& path);
nlohmann::json context_to_json(const Context& context);

// Checks every Context invariant; throws on the first violation.
void validate_context(const Context& context);

std::string_view to_string(SemanticType type);
std::string_view to_string(Role role);
std::string_view to_string(ImageSource source);
SemanticType semantic_type_from_string(std::string_view name);
Role role_from_string(std::string_view name);
ImageSource image_source_from_string(std::string_view name);

} // namespace mmqa
