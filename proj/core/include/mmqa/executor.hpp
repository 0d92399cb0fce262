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

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmqa/dataset_io.hpp"
#include "mmqa/templates.hpp"

namespace mmqa {

enum class Aggregation { none, sum, mean, count, yes, no };

// Selects cells for the predicate and aggregates them. NONE returns the
// selected cell strings, SUM and MEAN one number, COUNT the cell count, YES
// and NO a constant. Throws ValidationError for an unknown column or a
// non-numeric cell under SUM or MEAN.
AnswerList table_answer(const Table& table, const TablePredicate& predicate, Aggregation aggregation = Aggregation::none);

// What an answerer sees. Fields are assembled in this order for external
// answerers: question, question type, hop, hop-1 answers, modality context.
struct AnswerRequest {
    std::string question;
    std::string question_type;
    int hop = 1;
    std::optional<AnswerList> hop1_answers;
    Modality modality = Modality::table;
    const Example* example = nullptr;  // context and, for oracles, gold supervision
};

struct ScoredAnswers {
    AnswerList answers;
    std::vector<double> confidences;
};

class ModalityAnswerer {
public:
    virtual ~ModalityAnswerer() = default;
    virtual ScoredAnswers answer(const AnswerRequest& request) const = 0;
    // Whether one instance may serve concurrent executions.
    virtual bool shareable() const { return true; }
};

// Gold-backed answerer. Hop 1 returns the stored intermediates (or the final
// answers of a one-hop plan); hop 2 returns the final answers only when the
// hop-1 input matches the stored intermediates.
class OracleAnswerer : public ModalityAnswerer {
public:
    explicit OracleAnswerer(const TemplateRegistry& registry = TemplateRegistry::builtin()) : registry_(registry) {}
    ScoredAnswers answer(const AnswerRequest& request) const override;

private:
    const TemplateRegistry& registry_;
};

// Executes the example's table predicate over its table, taking bridged
// values from hop-1 answers. Answers nothing unless the predicate's
// non-bridged condition value and any superlative or compare column name
// occur in the question text.
class TableAnswerer : public ModalityAnswerer {
public:
    ScoredAnswers answer(const AnswerRequest& request) const override;
};

// HTTP JSON answerer: {question, question_type, hop, hop1_answers,
// context_ref} -> {answers[], confidences[]}.
class ExternalAnswerer : public ModalityAnswerer {
public:
    ExternalAnswerer(std::string endpoint, std::chrono::milliseconds timeout = std::chrono::seconds(30));
    ScoredAnswers answer(const AnswerRequest& request) const override;
    bool shareable() const override { return false; }

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
};

class TypePredictor {
public:
    virtual ~TypePredictor() = default;
    virtual std::string predict(const Example& example, std::string_view question) const = 0;
};

// Returns the stored question type; throws ValidationError when the example
// carries none.
class GoldTypePredictor : public TypePredictor {
public:
    std::string predict(const Example& example, std::string_view question) const override;
};

using AnswererSet = std::map<Modality, std::shared_ptr<const ModalityAnswerer>>;

// "oracle", "table-deterministic" (table answerer plus oracles) or
// "external:<endpoint>".
AnswererSet make_answerers(const std::string& spec);

enum class Strategy { autorouting, implicitdecomp };

// Throws Error for unknown names and for the reserved question-only and
// context-only baselines.
Strategy strategy_from_string(std::string_view name);
std::string_view to_string(Strategy strategy);

struct StrategyContext {
    const AnswererSet& answerers;
    const TypePredictor& predictor;
    const TemplateRegistry& registry = TemplateRegistry::builtin();
};

// Calls only the final modality's answerer, once, as hop 1.
AnswerList auto_route(const Example& example, std::string_view question, const StrategyContext& ctx);

// Runs the hop plan, feeding hop-1 answers into the hop-2 call and applying
// the plan's combine step.
AnswerList implicit_decomp(const Example& example, std::string_view question, const StrategyContext& ctx);

AnswerList run_strategy(Strategy strategy, const Example& example, std::string_view question,
                        const StrategyContext& ctx);

// The question a strategy sees: the NL paraphrase if present, else the PL.
std::string question_text(const Example& example);

std::string_view to_string(Aggregation aggregation);
Aggregation aggregation_from_string(std::string_view name);

} // namespace mmqa
