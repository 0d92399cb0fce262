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
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mmqa/dataset_io.hpp"

namespace mmqa {

// Character Levenshtein distance over lowercased, whitespace-collapsed
// strings divided by the longer length; 0 when both are empty.
double normalized_edit_distance(std::string_view a, std::string_view b);

constexpr double kDiversityThreshold = 0.7;
inline bool earns_diversity_bonus(double ned) { return ned > kDiversityThreshold; }

enum class TaskState { open, submitted, validated, rejected };

struct Submission {
    int attempt = 0;
    std::string nl_text;
    double ned = 0;
    bool diversity_bonus = false;
    std::optional<bool> ai_correct;  // set by the first ai-check of this attempt
    bool adversarial_bonus = false;
    std::string annotator;
    std::string timestamp;
};

struct Verdict {
    bool meaning_preserved = false;
    int naturalness = 3;  // 1-5
    std::string annotator;
};

struct ParaphraseTask {
    std::string qid;
    std::string pl_question;
    std::string context_id;
    std::optional<AnswerList> bridge_answer;
    AnswerList answers;
    TaskState state = TaskState::open;
    std::vector<Submission> submissions;
    std::vector<Verdict> verdicts;
    std::size_t rejections = 0;
};

struct SubmitFeedback {
    int attempt = 0;
    double ned = 0;
    bool diversity_bonus = false;
    bool ai_answer_available = false;
};

struct AiCheckResult {
    int attempt = 0;
    bool first_attempt_correct = false;
    bool this_attempt_correct = false;
    bool adversarial_bonus = false;
    std::string checker;
};

enum class TaskQueue { paraphrase, validation };

// Task store for the paraphrase and validation workflow. Every mutation is
// appended to a per-task event log under `store_dir` and replayed on
// construction. Throws ReferenceError for unknown qids, StateError for
// illegal transitions and ValidationError for bad input.
class AnnotationService {
public:
    using Clock = std::function<std::chrono::system_clock::time_point()>;
    static constexpr std::chrono::minutes kLease{30};
    static constexpr const char* kChecker = "deterministic-executor";

    AnnotationService(std::vector<Example> dataset, std::filesystem::path store_dir, Clock clock = {});

    // Leases the next task of the queue to `worker`, or nothing.
    std::optional<ParaphraseTask> lease_next(const std::string& worker, TaskQueue queue = TaskQueue::paraphrase);
    void release(const std::string& qid);
    ParaphraseTask task(const std::string& qid) const;
    const Example& example(const std::string& qid) const;
    std::vector<ParaphraseTask> tasks() const;

    SubmitFeedback submit_paraphrase(const std::string& qid, const std::string& nl_text,
                                     const std::string& annotator = {});
    double live_ned(const std::string& qid, const std::string& nl_text) const;
    // Defaults to the latest attempt.
    AiCheckResult ai_check(const std::string& qid, std::optional<int> attempt = std::nullopt);
    TaskState validate(const std::string& qid, const Verdict& verdict);

    // The dataset with validated paraphrases merged in as nl_question.
    std::vector<Example> export_dataset() const;

private:
    struct Entry {
        ParaphraseTask task;
        std::optional<std::string> lease_holder;
        std::chrono::system_clock::time_point lease_expiry{};
    };

    Entry& entry(const std::string& qid);
    const Entry& entry(const std::string& qid) const;
    void append(const std::string& qid, const nlohmann::json& event);
    void apply(Entry& e, const nlohmann::json& event, bool replay);
    void replay();
    bool answer_correct(const Example& example, const std::string& text) const;
    std::filesystem::path log_path(const std::string& qid) const;

    std::vector<Example> dataset_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, Entry> entries_;
    std::filesystem::path store_dir_;
    Clock clock_;
    mutable std::mutex mutex_;
};

nlohmann::json task_to_json(const ParaphraseTask& task);
std::string_view to_string(TaskState state);
TaskState task_state_from_string(std::string_view name);

} // namespace mmqa
