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
#include <optional>
#include <string>
#include <vector>

#include "mmqa/composer.hpp"
#include "mmqa/context_model.hpp"
#include "mmqa/qgen_atomic.hpp"

// Reference implementations written without the core's parsing, matching or
// execution code. Tests compare the core against these.
namespace oracle {

// Lowercase ASCII, replace ASCII punctuation with nothing, squeeze spaces.
std::string squeeze(const std::string& s);

// Days since 0000-03-01 for the accepted date formats, via regular expressions.
std::optional<long long> date_days(const std::string& cell);
// Plain, grouped or currency-prefixed decimal numbers.
std::optional<double> number(const std::string& cell);
std::optional<double> sort_key(mmqa::SemanticType type, const std::string& cell);

// Rule-by-rule column labelling.
mmqa::SemanticType label_column(const std::vector<std::string>& cells);

// Rows selected by a lookup or superlative predicate, ascending.
std::vector<std::size_t> predicate_rows(const mmqa::Table& table, const mmqa::TablePredicate& p);
mmqa::AnswerList predicate_answers(const mmqa::Table& table, const mmqa::TablePredicate& p);

struct Outcome {
    mmqa::AnswerList answers;
    std::optional<mmqa::AnswerList> intermediate;
};

// Brute-force program evaluation. Table leaves with a predicate are
// re-executed against the table; other leaves contribute their stored
// answers. Returns nothing when an operation precondition fails.
std::optional<Outcome> run(const mmqa::Program& program, const mmqa::Table& table);

// Token-multiset F1 after normalization (articles removed).
double pair_f1(const std::string& gold, const std::string& pred);
// Maximum over every one-to-one alignment, by enumeration.
double brute_list_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred);
bool multiset_em(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

} // namespace oracle
