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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmqa/composer.hpp"
#include "mmqa/distractor.hpp"

namespace mmqa {

enum class Split { train, dev, test };

struct Example {
    std::string qid;
    std::string pl_question;
    std::optional<std::string> nl_question;
    Program program;
    std::string question_type;
    AnswerList answers;
    std::optional<AnswerList> intermediate_answers;
    AssembledContext context;
    std::optional<Split> split;
    bool multimodal = false;
    bool compositional = false;
    // Which checker produced the paraphrase feedback, set on export.
    std::optional<std::string> feedback_checker;

    bool operator==(const Example&) const = default;
};

// Flags recomputed from the program.
bool compute_multimodal(const Program& program);
bool compute_compositional(const Program& program);
// Throws ValidationError if answers are empty or stored flags disagree.
void validate_example(const Example& example);

// One JSON object per line, keys sorted. Throws SchemaError naming the line
// for malformed input and ValidationError naming a duplicate qid.
void write_examples(std::ostream& out, const std::vector<Example>& examples);
std::vector<Example> read_examples(std::istream& in, const std::string& source = "<stream>");
void write_jsonl(const std::filesystem::path& path, const std::vector<Example>& examples);
std::vector<Example> read_jsonl(const std::filesystem::path& path);

struct SplitRatios {
    double train = 0.8;
    double dev = 0.1;
    double test = 0.1;

    double of(Split split) const;
    // "reference" (23,817/2,441/3,660), "mini" (0.6/0.2/0.2) or "a/b/c".
    static SplitRatios parse(const std::string& spec);
    static SplitRatios reference();
};

struct SplitResult {
    std::vector<Split> assignment;       // parallel to the examples
    std::array<std::size_t, 3> groups{};  // context groups per split
    std::array<std::size_t, 3> examples{};
    SplitRatios target;
    SplitRatios achieved;  // by context groups
};

// Assigns connected context groups (shared table, gold paragraph or gold
// image) to splits by largest remainder after a seeded shuffle. Throws
// ValidationError when a split with a positive ratio receives no group.
SplitResult split_dataset(const std::vector<Example>& examples, const SplitRatios& ratios, std::uint64_t seed);
void apply_split(std::vector<Example>& examples, const SplitResult& result);

// Keys shared between an example and any other example it must co-split with.
std::vector<std::string> context_keys(const Example& example);

// Drops single-modality dev/test examples (seeded) until multimodal ones make
// up at least `fraction` of each evaluation split.
std::vector<Example> multimodal_boost(std::vector<Example> examples, double fraction, std::uint64_t seed);

struct DatasetManifest {
    std::map<std::string, std::size_t> counts;
    std::uint64_t seed = 0;
    std::string config_hash;
    SplitRatios target;
    SplitRatios achieved;
};

// Writes train/dev/test .jsonl plus manifest.json into `dir`.
void write_dataset(const std::filesystem::path& dir, const std::vector<Example>& examples,
                   const DatasetManifest& manifest);
// Accepts a .jsonl file or a dataset directory.
std::vector<Example> read_dataset(const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& dir);

struct SplitStats {
    std::size_t n = 0;
    double pct_multimodal = 0;
    double pct_compositional = 0;
};

struct CorpusStats {
    std::size_t n_questions = 0;
    std::map<std::string, SplitStats> by_split;  // train, dev, test, dev+test
    double avg_question_length = 0;
    double avg_answers_per_question = 0;
    double pct_list_answers = 0;
    double pct_list_intermediate = 0;  // among questions with intermediates
    double avg_answer_length = 0;
    std::size_t distinct_question_words = 0;
    std::size_t distinct_answer_words = 0;
    std::size_t distinct_tables = 0;
};

// Throws ValidationError on an empty dataset.
CorpusStats compute_stats(const std::vector<Example>& examples);
nlohmann::json stats_to_json(const CorpusStats& stats);

// The published key statistics, for display only.
struct ReferenceStats {
    std::size_t n_questions = 29918;
    double train_multimodal = 34.6;
    double devtest_multimodal = 40.1;
    double train_compositional = 58.8;
    double devtest_compositional = 62.3;
    double avg_question_length = 18.2;
    double avg_answers_per_question = 1.16;
    double pct_list_answers = 7.4;
    double pct_list_intermediate = 18.9;
    double avg_answer_length = 2.1;
    std::size_t distinct_question_words = 49649;
    std::size_t distinct_answer_words = 20820;
    std::size_t distinct_tables = 11022;
};

std::string_view to_string(Split split);
Split split_from_string(std::string_view name);

} // namespace mmqa
