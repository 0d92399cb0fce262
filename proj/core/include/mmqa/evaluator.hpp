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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mmqa/dataset_io.hpp"

namespace mmqa {

// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
// whitespace.
std::string normalize_answer(std::string_view text);

// Token-multiset F1 over normalized strings.
double pair_f1(std::string_view gold, std::string_view pred);

struct ListScore {
    double em = 0;
    double f1 = 0;
};

// Maximum-weight one-to-one alignment of pair_f1 scores, divided by the
// longer list length. EM is normalized multiset equality.
ListScore list_em_f1(const std::vector<std::string>& gold, const std::vector<std::string>& pred);

// Maximum-weight perfect matching on a square matrix; returns the column
// assigned to each row.
std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct Prediction {
    std::string qid;
    std::vector<std::string> answers;
};

// JSON lines of {qid, answers}. Throws ValidationError on a duplicate qid.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions);

struct ExampleScore {
    std::string qid;
    double em = 0;
    double f1 = 0;
    bool multimodal = false;
    bool missing = false;
};

struct BucketScore {
    double em = 0;
    double f1 = 0;
    std::size_t count = 0;
};

struct EvalReport {
    std::vector<ExampleScore> examples;
    BucketScore single_modality;
    BucketScore multi_modality;
    BucketScore all;
    std::size_t missing = 0;
};

// Missing predictions score zero. Throws ValidationError for a prediction
// whose qid is not in the dataset or appears twice.
EvalReport evaluate(const std::vector<Example>& dataset, const std::vector<Prediction>& predictions);
nlohmann::json report_to_json(const EvalReport& report);
std::string format_report(const EvalReport& report);

enum class AuditKind { weak_distractors, redundant_evidence };

struct AuditFlag {
    std::string qid;
    AuditKind kind = AuditKind::weak_distractors;
    std::string evidence;
};

enum class AnswerClass { year, date, number };

std::optional<AnswerClass> classify_answer(std::string_view answer);

// Distinct values of one class across the table cells and paragraphs.
std::set<std::string> typed_instances(const AssembledContext& context, AnswerClass cls);

std::optional<AuditFlag> detect_weak_distractors(const Example& example);
std::optional<AuditFlag> detect_redundant_evidence(const Example& example);
std::vector<AuditFlag> audit_dataset(const std::vector<Example>& examples);

std::string_view to_string(AuditKind kind);
std::string_view to_string(AnswerClass cls);

} // namespace mmqa
