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
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mmqa/context_model.hpp"
#include "mmqa/qgen_atomic.hpp"

namespace mmqa {

// Per-example context: the table plus exactly 10 paragraphs and the gold and
// distractor images.
struct AssembledContext {
    std::string context_id;
    Table table;
    std::vector<Paragraph> paragraphs;  // roles are gold or distractor
    std::vector<ImageRef> images;
    std::vector<std::string> gold_image_ids;

    std::vector<const Paragraph*> gold_paragraphs() const;
    std::size_t image_distractor_count() const;
    bool operator==(const AssembledContext&) const = default;
};

// Higher is more relevant. Implementations must be deterministic.
class RetrievalScorer {
public:
    virtual ~RetrievalScorer() = default;
    virtual std::vector<double> score(std::string_view question, const std::vector<std::string>& paragraphs) const = 0;
};

// TF-IDF cosine over lowercased tokens. Without document frequencies every
// term has idf 1.
class LexicalScorer : public RetrievalScorer {
public:
    LexicalScorer() = default;
    explicit LexicalScorer(const std::vector<std::string>& corpus);

    double score(std::string_view question, std::string_view paragraph) const;
    std::vector<double> score(std::string_view question, const std::vector<std::string>& paragraphs) const override;
    double idf(const std::string& term) const;

private:
    std::map<std::string, std::size_t> df_;
    std::size_t n_docs_ = 0;
};

double lexical_scorer(std::string_view question, std::string_view paragraph);

// POSTs {question, paragraphs[]} to `endpoint` and reads {scores[]}. Falls
// back to `fallback` (with a warning on stderr) on any transport or format
// failure.
class HttpScorer : public RetrievalScorer {
public:
    HttpScorer(std::string endpoint, std::chrono::milliseconds timeout,
               std::shared_ptr<const RetrievalScorer> fallback = std::make_shared<LexicalScorer>());
    std::vector<double> score(std::string_view question, const std::vector<std::string>& paragraphs) const override;

private:
    std::string endpoint_;
    std::chrono::milliseconds timeout_;
    std::shared_ptr<const RetrievalScorer> fallback_;
};

enum class Partition { train, eval };

// Distractor paragraph ids per partition; a paragraph used in one partition
// is ineligible in the other.
class DistractorLedger {
public:
    bool blocked(Partition partition, const std::string& paragraph_id) const;
    void record(Partition partition, const std::string& paragraph_id);
    const std::set<std::string>& used(Partition partition) const;

private:
    std::set<std::string> train_;
    std::set<std::string> eval_;
};

struct TextDistractorRequest {
    std::string question;
    AnswerList answers;
    std::vector<Paragraph> gold;
    Partition partition = Partition::train;
};

constexpr std::size_t kContextParagraphs = 10;
constexpr std::size_t kMaxImageDistractors = 15;

// Fills the context up to exactly 10 paragraphs with the top-scored eligible
// pool paragraphs, records them in the ledger, and returns gold plus
// distractors ordered by id.
std::vector<Paragraph> select_text_distractors(const TextDistractorRequest& request,
                                               const std::vector<Paragraph>& pool,
                                               const RetrievalScorer& scorer, DistractorLedger& ledger);

// Why a pool paragraph is ineligible, or empty if it is eligible.
std::string distractor_exclusion(const Paragraph& candidate, const TextDistractorRequest& request,
                                 const DistractorLedger& ledger);

// Seeded uniform sample of at most 15 candidate images, excluding gold ids.
std::vector<ImageRef> select_image_distractors(const std::vector<ImageRef>& candidates,
                                               const std::set<std::string>& gold_image_ids, std::uint64_t seed);

// Images of entities linked from the table plus in-table images.
std::vector<ImageRef> table_entity_images(const Context& context);

// Normalized substring test used for answer-leak exclusion.
bool leaks_answer(std::string_view paragraph, const AnswerList& answers);

std::string_view to_string(Partition partition);

} // namespace mmqa
