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
#include <string>
#include <vector>

#include "mmqa/composer.hpp"
#include "mmqa/corpus.hpp"
#include "mmqa/dataset_io.hpp"
#include "mmqa/distractor.hpp"
#include "mmqa/evaluator.hpp"
#include "mmqa/executor.hpp"
#include "mmqa/templates.hpp"

namespace mmqa {

struct GenerateConfig {
    std::uint64_t seed = 0;
    std::size_t max_per_template = 5;
    TableQuestionConfig table;
    TableFilter filter;
    bool apply_filter = true;
};

struct GenerateReport {
    struct Entry {
        std::string id;
        std::string reason;
    };
    std::vector<Entry> skipped_contexts;
    std::vector<Entry> skipped_questions;
    std::size_t atomic_questions = 0;
};

// Table, image and text questions available for one context.
std::vector<AtomicQuestion> build_atomic_bank(const Corpus& corpus, const Context& context,
                                              const GenerateConfig& config, GenerateReport* report = nullptr);

// Gold paragraphs of a program: anchors of its text leaves, else the
// context's gold-role paragraphs.
std::vector<Paragraph> gold_paragraphs_for(const Program& program, const Context& context,
                                           const std::vector<RCTriple>& triples);
std::vector<ImageRef> gold_images_for(const Program& program, const Context& context);

// Instantiates every registry template over every context. Examples carry only
// their gold evidence; qid is "<context id>-<hash of the canonical program>".
std::vector<Example> generate_examples(const Corpus& corpus, const TemplateRegistry& registry,
                                       const GenerateConfig& config, GenerateReport* report = nullptr);

// True for question types whose final hop reads a single image.
bool needs_image_distractors(const std::string& question_type);

// Fills each split example's context with exactly 10 paragraphs and, for
// single-image types, up to 15 distractor images. Evaluation splits are
// processed first so the train partition cannot claim their distractors.
void distract_examples(std::vector<Example>& examples, const Corpus& corpus, const RetrievalScorer& scorer,
                       std::uint64_t seed);

// Stable digest of everything that affects generated bytes.
std::string config_hash(const Corpus& corpus, const TemplateRegistry& registry, const GenerateConfig& config);

// Runs `strategy` on every example; failures yield empty predictions.
std::vector<Prediction> predict_dataset(const std::vector<Example>& examples, Strategy strategy,
                                        const StrategyContext& ctx, bool use_nl = true);

} // namespace mmqa
