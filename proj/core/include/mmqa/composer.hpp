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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmqa/context_model.hpp"
#include "mmqa/qgen_atomic.hpp"
#include "mmqa/templates.hpp"

namespace mmqa {

// Operation tree over atomic leaves. Compose children are {outer, inner};
// Intersect and Compare children are {left, right}.
struct Program {
    Operation op = Operation::atomic;
    std::optional<AtomicQuestion> atomic;
    std::vector<Program> children;
    std::optional<std::size_t> compare_column;
    std::optional<Extremum> compare_op;
    std::string question_type;

    static Program leaf(AtomicQuestion question, std::string question_type = {});
    static Program compose(Program outer, Program inner, std::string question_type = {});
    static Program intersect(Program left, Program right, std::string question_type = {});
    static Program compare(Program left, Program right, std::size_t column, Extremum op,
                           std::string question_type = {});

    // Number of operation levels; 0 for a leaf.
    std::size_t depth() const;
    bool is_atomic() const { return op == Operation::atomic; }
    // Leaves in left-to-right order.
    std::vector<const AtomicQuestion*> leaves() const;

    bool operator==(const Program&) const = default;
};

struct ExecResult {
    AnswerList answers;
    std::optional<AnswerList> intermediate;  // hop-1 answers of the top operation
};

struct ComposedQuestion {
    Program program;
    std::string pl_text;  // with the open-domain prefix
    AnswerList answers;
    std::optional<AnswerList> intermediate_answers;
    std::set<Modality> modalities_used;  // answerer modalities of the leaves

    bool multimodal() const { return modalities_used.size() >= 2; }
};

// Checks the structural invariants of every node; throws CompositionError.
void validate_program(const Program& program, const Context& context);

// Evaluates the program with leaf gold answers as values. Throws
// CompositionError when an operation precondition fails.
ExecResult execute(const Program& program, const Context& context);

// Cells selected by a table predicate, computed from the table itself.
std::vector<CellCoord> select_table_cells(const Table& table, const TablePredicate& predicate);
AnswerList execute_table_predicate(const Table& table, const TablePredicate& predicate);

// The single table row an answer refers to: rows linking its entity title,
// else rows holding its text. Empty unless exactly one row matches.
std::optional<std::size_t> resolve_answer_row(const Table& table, const AnswerList& answers, std::size_t index = 0);

std::string open_domain_prefix(const Table& table);
// PL text without the prefix.
std::string render_body(const Program& program, const Context& context);
std::string render_pl(const Program& program, const Context& context);

// "most recent", "earliest", "highest" or "lowest".
std::string compare_phrase(const Table& table, std::size_t column, Extremum op);

std::set<Modality> modalities_used(const Program& program);

ComposedQuestion make_question(Program program, const Context& context);
ComposedQuestion compose(const Program& outer, const Program& inner, const Context& context,
                         std::string question_type = {});
ComposedQuestion intersect(const Program& left, const Program& right, const Context& context,
                           std::string question_type = {});
ComposedQuestion compare(const Program& left, const Program& right, std::size_t column, Extremum op,
                         const Context& context, std::string question_type = {});

struct InstantiateConfig {
    std::uint64_t seed = 0;
    std::size_t max_per_template = 5;
};

// Candidate programs per registry template whose preconditions hold and whose
// answers are non-degenerate, capped per template by a seeded sample.
std::vector<ComposedQuestion> instantiate_templates(const Context& context,
                                                    const std::vector<AtomicQuestion>& bank,
                                                    const TemplateRegistry& registry,
                                                    const InstantiateConfig& config = {});

// Canonical text of a program, stable across runs; basis of example ids.
std::string canonical_program_key(const Program& program);

} // namespace mmqa
