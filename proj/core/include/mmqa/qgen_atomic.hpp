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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmqa/context_linker.hpp"
#include "mmqa/context_model.hpp"

namespace mmqa {

enum class Modality { table, text, image, image_list };
enum class AnswerKind { entity, string };
enum class Extremum { min, max };

struct AnswerList {
    std::vector<std::string> values;
    // Parallel to `values` when the answers are WikiEntities.
    std::optional<std::vector<std::string>> entity_titles;

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    bool is_entity_list() const { return entity_titles.has_value(); }
    bool operator==(const AnswerList&) const = default;

    static AnswerList strings(std::vector<std::string> values);
    static AnswerList entities(std::vector<std::string> titles);
};

// Throws ValidationError unless the list is non-empty and entity_titles (if
// present) is parallel to values.
void validate_answers(const AnswerList& answers);

// Structured form of a generated table question. Lookup: cells of
// `target_column` in rows whose `condition_column` equals `condition_value`.
// Superlative: cells of `target_column` attaining the extremum, optionally
// restricted by the same condition.
struct TablePredicate {
    std::size_t target_column = 0;
    std::optional<std::size_t> condition_column;
    std::optional<std::string> condition_value;
    std::optional<Extremum> superlative;
    bool operator==(const TablePredicate&) const = default;
};

struct Anchors {
    std::vector<CellCoord> cells;
    std::vector<std::size_t> columns;
    std::vector<std::string> paragraph_ids;
    std::vector<std::string> image_ids;
    bool operator==(const Anchors&) const = default;
};

// A WikiEntity mentioned in the PL text; `surface` is the exact substring that
// Compose replaces.
struct EntityMention {
    std::string title;
    std::string surface;
    bool operator==(const EntityMention&) const = default;
};

struct AtomicQuestion {
    std::string id;
    Modality modality = Modality::table;
    std::string pl_text;  // body without the open-domain prefix
    AnswerList answers;
    Anchors anchors;
    AnswerKind answer_kind = AnswerKind::string;
    std::optional<TablePredicate> predicate;
    std::vector<EntityMention> mentions;
    bool operator==(const AtomicQuestion&) const = default;
};

struct TableQuestionConfig {
    std::size_t max_lookup_questions = 50;
    std::size_t max_superlative_questions = 50;
    // Condition values filling more than this share of rows are skipped.
    double max_condition_row_fraction = 0.6;
    std::uint64_t seed = 0;
};

// "Which cells in [X] have the [Y] in [Z]?"
std::vector<AtomicQuestion> gen_table_lookup_questions(const Table& table,
                                                       const TableQuestionConfig& config = {});

// "What was the MOST RECENT [Year](s) where the [Location] was [Forest Hills]?"
std::vector<AtomicQuestion> gen_table_superlative_questions(const Table& table,
                                                            const TableQuestionConfig& config = {});

// Body text for a table predicate; used by generation and by tests that
// re-render predicates.
std::string render_table_question(const Table& table, const TablePredicate& predicate);

struct ImageBankRecord {
    std::string id;
    std::string context_id;
    bool list = false;
    std::string question;
    std::vector<std::string> answers;
    std::vector<std::string> image_ids;
    std::optional<std::string> column_anchor;  // header name or decimal index
    std::optional<std::string> entity_focus;
};

std::vector<ImageBankRecord> read_image_bank(const std::filesystem::path& path);
ImageBankRecord parse_image_bank_record(const nlohmann::json& record, std::size_t line_number);

std::set<std::string> read_vocabulary(const std::filesystem::path& path);

// Validates bank records addressed to `context` and converts them. Throws
// ValidationError for a single-image record without exactly one answer, an
// answer outside the vocabulary or outside the anchored column, and
// ReferenceError for dangling image ids.
std::vector<AtomicQuestion> ingest_image_questions(const std::vector<ImageBankRecord>& records,
                                                   const Context& context,
                                                   const std::set<std::string>& vocabulary,
                                                   const std::set<std::string>& blocklist = {});

struct LinkedTriple {
    RCTriple triple;
    std::vector<LinkResult> links;
};

std::vector<LinkedTriple> link_triples(const std::vector<RCTriple>& triples, const Context& context);

struct IngestReport {
    struct Entry {
        std::string id;
        std::string reason;
    };
    std::vector<Entry> skipped;
};

// Wraps linked triples as text questions. Unlinked triples are skipped and
// reported. `corpus_entities` decides answer_kind.
std::vector<AtomicQuestion> ingest_text_questions(const std::vector<LinkedTriple>& linked,
                                                  const std::set<std::string>& corpus_entities,
                                                  IngestReport* report = nullptr);

std::string_view to_string(Modality modality);
Modality modality_from_string(std::string_view name);
std::string_view to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(std::string_view name);
std::string_view to_string(Extremum op);
Extremum extremum_from_string(std::string_view name);

} // namespace mmqa
