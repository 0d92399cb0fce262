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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmqa/context_model.hpp"

namespace mmqa {

enum class RcSource { nq, boolq, hotpotqa, other };

// A reading-comprehension question with its gold evidence.
struct RCTriple {
    std::string id;
    std::string question;
    std::vector<std::string> answers;
    std::vector<Paragraph> gold_paragraphs;  // 1-2
    RcSource source = RcSource::other;
};

struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const CharSpan&) const = default;
};

struct LinkResult {
    std::string entity_title;
    CellCoord table_coords;
    CharSpan match_span;  // byte range in the question
    bool operator==(const LinkResult&) const = default;
};

// Linear scorer for picking the column that names the entities depicted by
// in-table images. Weights are applied to features in [0, 1]; the score is
// clamped to [0, 1].
struct ImageColumnModel {
    double w_left_position = 0.20;
    double w_uniqueness = 0.25;
    double w_single_entity = 0.35;
    double w_short_text = -0.30;
    double w_header_keyword = 0.20;
    double threshold = 0.5;
    std::vector<std::string> header_keywords = {
        "name", "title", "film", "building", "structure", "player", "species",
        "station", "album", "song", "artist", "work", "statue", "subject", "game", "show"};
};

struct ImageColumnFeatures {
    double left_position = 0;   // 1 for the leftmost column, 0 for the rightmost
    double uniqueness = 0;      // distinct cell texts / rows
    double single_entity = 0;   // cells with exactly one link / rows
    double short_text = 0;      // cells with <= 2 characters / rows
    double header_keyword = 0;  // 1 if the header contains a keyword
};

ImageColumnFeatures image_column_features(const Table& table, std::size_t column,
                                          const ImageColumnModel& model = {});

// Per-column scores. `images_by_column[c]` counts in-table images held by
// column c; such columns hold the pictures rather than their descriptions and
// score 0. Throws ValidationError for a table without columns.
std::vector<double> detect_image_column(const Table& table,
                                        const std::vector<std::size_t>& images_by_column,
                                        const ImageColumnModel& model = {});

// Argmax of detect_image_column if it clears the threshold.
std::optional<std::size_t> select_image_column(const Table& table,
                                               const std::vector<std::size_t>& images_by_column,
                                               const ImageColumnModel& model = {});

std::vector<std::size_t> in_table_images_by_column(const Table& table);

// entity title -> ImageRef for every entity whose image exists and is not
// blocklisted. An in_table image is never mapped to two entities.
std::map<std::string, ImageRef> map_entity_images(const std::vector<WikiEntity>& entities,
                                                  const std::vector<ImageRef>& images,
                                                  const std::set<std::string>& blocklist);

// title -> lowercased token sequence.
using EntityIndex = std::map<std::string, std::vector<std::string>>;

EntityIndex build_entity_index(const std::vector<std::string>& titles);

// Whole-token, case-insensitive entity matches against the question; on
// overlapping matches the longest wins (ties: leftmost, then title order).
// One LinkResult per (matched entity, linking cell).
std::vector<LinkResult> link_text_question(const RCTriple& triple, const Table& table,
                                           const EntityIndex& entity_index);

struct ColumnCellInfo {
    std::optional<std::string> entity;    // first linked entity, if any
    std::optional<std::string> image_id;  // its image (or the cell's in-table image)
};

std::vector<ColumnCellInfo> column_cell_info(const Context& context, std::size_t column,
                                             const std::set<std::string>& blocklist = {});

// >= 4 distinct entities, <= 3 cells sharing a duplicated image, <= 2
// entities without an image.
bool eligible_image_list_column(const std::vector<ColumnCellInfo>& cells);

std::vector<RCTriple> read_rc_triples(const std::filesystem::path& path);
RCTriple parse_rc_triple(const nlohmann::json& record, std::size_t line_number);
std::set<std::string> read_blocklist(const std::filesystem::path& path);

std::string_view to_string(RcSource source);
RcSource rc_source_from_string(std::string_view name);

} // namespace mmqa
