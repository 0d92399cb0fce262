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

#include "mmqa/annotation_service.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/evaluator.hpp"
#include "mmqa/executor.hpp"
#include "mmqa/serialization.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

// ---- Edit distance ---------------------------------------------------------

namespace {

std::u32string code_points(std::string_view s) {
    std::u32string out;
    for (std::size_t i = 0; i < s.size();) {
        const auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 1;
        if (i + len > s.size()) len = 1;
        char32_t cp = len == 1 ? c : c & (0x7f >> len);
        for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3f);
        out.push_back(cp);
        i += len;
    }
    return out;
}

} // namespace

double normalized_edit_distance(std::string_view a, std::string_view b) {
    const auto x = code_points(text::collapse_whitespace(text::to_lower(a)));
    const auto y = code_points(text::collapse_whitespace(text::to_lower(b)));
    const std::size_t longest = std::max(x.size(), y.size());
    if (longest == 0) return 0.0;
    std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
    for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= y.size(); ++j) {
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[y.size()]) / static_cast<double>(longest);
}

// ---- States ----------------------------------------------------------------

std::string_view to_string(TaskState s) {
    switch (s) {
    case TaskState::open: return "open";
    case TaskState::submitted: return "submitted";
    case TaskState::validated: return "validated";
    case TaskState::rejected: return "rejected";
    }
    return "open";
}

TaskState task_state_from_string(std::string_view name) {
    if (name == "open") return TaskState::open;
    if (name == "submitted") return TaskState::submitted;
    if (name == "validated") return TaskState::validated;
    if (name == "rejected") return TaskState::rejected;
    throw SchemaError("unknown task state '" + std::string(name) + "'");
}

json task_to_json(const ParaphraseTask& t) {
    json subs = json::array();
    for (const auto& s : t.submissions) {
        subs.push_back(json{{"attempt", s.attempt},
                            {"nl_text", s.nl_text},
                            {"ned", s.ned},
                            {"diversity_bonus", s.diversity_bonus},
                            {"ai_correct", s.ai_correct ? json(*s.ai_correct) : json(nullptr)},
                            {"adversarial_bonus", s.adversarial_bonus},
                            {"annotator", s.annotator},
                            {"timestamp", s.timestamp}});
    }
    json verdicts = json::array();
    for (const auto& v : t.verdicts) {
        verdicts.push_back(json{{"meaning_preserved", v.meaning_preserved},
                                {"naturalness", v.naturalness},
                                {"annotator", v.annotator}});
    }
    return json{{"qid", t.qid},
                {"pl_question", t.pl_question},
                {"context_id", t.context_id},
                {"bridge_answer", t.bridge_answer ? to_json(*t.bridge_answer) : json(nullptr)},
                {"answers", to_json(t.answers)},
                {"state", to_string(t.state)},
                {"submissions", std::move(subs)},
                {"verdicts", std::move(verdicts)},
                {"rejections", t.rejections}};
}

// ---- Service ---------------------------------------------------------------

AnnotationService::AnnotationService(std::vector<Example> dataset, std::filesystem::path store_dir, Clock clock)
    : dataset_(std::move(dataset)), store_dir_(std::move(store_dir)), clock_(std::move(clock)) {
    if (!clock_) clock_ = [] { return std::chrono::system_clock::now(); };
    for (std::size_t i = 0; i < dataset_.size(); ++i) {
        const Example& e = dataset_[i];
        if (!index_.emplace(e.qid, i).second) throw ValidationError("duplicate qid '" + e.qid + "'");
        Entry en;
        en.task.qid = e.qid;
        en.task.pl_question = e.pl_question;
        en.task.context_id = e.context.context_id;
        if (e.program.depth() >= 1) en.task.bridge_answer = e.intermediate_answers;
        en.task.answers = e.answers;
        entries_.emplace(e.qid, std::move(en));
    }
    std::filesystem::create_directories(store_dir_);
    replay();
}

std::filesystem::path AnnotationService::log_path(const std::string& qid) const {
    std::string name;
    for (char c : qid) {
        const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        name.push_back(safe ? c : '_');
    }
    return store_dir_ / (name + "." + text::hex_digest(text::fnv1a(qid), 8) + ".events.jsonl");
}

AnnotationService::Entry& AnnotationService::entry(const std::string& qid) {
    auto it = entries_.find(qid);
    if (it == entries_.end()) throw ReferenceError("unknown qid '" + qid + "'");
    return it->second;
}

const AnnotationService::Entry& AnnotationService::entry(const std::string& qid) const {
    auto it = entries_.find(qid);
    if (it == entries_.end()) throw ReferenceError("unknown qid '" + qid + "'");
    return it->second;
}

void AnnotationService::append(const std::string& qid, const json& event) {
    std::ofstream out(log_path(qid), std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to the task store for '" + qid + "'");
    out << event.dump() << '\n';
    out.flush();
    if (!out) throw Error("write to the task store failed for '" + qid + "'");
}

void AnnotationService::apply(Entry& e, const json& ev, bool replay) {
    ParaphraseTask& t = e.task;
    const std::string type = ev.at("type").get<std::string>();
    auto fail = [&](const std::string& msg) -> void {
        if (replay) throw SchemaError("corrupt task store for '" + t.qid + "': " + msg);
        throw StateError(msg);
    };
    if (type == "submission") {
        if (t.state != TaskState::open && t.state != TaskState::submitted) {
            fail("task '" + t.qid + "' is " + std::string(to_string(t.state)) + " and takes no paraphrases");
            return;
        }
        Submission s;
        s.attempt = ev.at("attempt").get<int>();
        s.nl_text = ev.at("nl_text").get<std::string>();
        s.ned = ev.at("ned").get<double>();
        s.diversity_bonus = ev.at("diversity_bonus").get<bool>();
        s.annotator = ev.value("annotator", "");
        s.timestamp = ev.value("timestamp", "");
        if (s.attempt != static_cast<int>(t.submissions.size()) + 1) fail("attempt numbers out of sequence");
        t.submissions.push_back(std::move(s));
        t.state = TaskState::submitted;
        e.lease_holder.reset();
    } else if (type == "ai_check") {
        const int attempt = ev.at("attempt").get<int>();
        if (attempt < 1 || attempt > static_cast<int>(t.submissions.size())) fail("ai-check for a missing attempt");
        Submission& s = t.submissions[static_cast<std::size_t>(attempt - 1)];
        s.ai_correct = ev.at("correct").get<bool>();
        if (ev.contains("adversarial_bonus")) s.adversarial_bonus = ev["adversarial_bonus"].get<bool>();
    } else if (type == "verdict") {
        if (t.state != TaskState::submitted) {
            fail("task '" + t.qid + "' is " + std::string(to_string(t.state)) + ", not submitted");
            return;
        }
        Verdict v{ev.at("meaning_preserved").get<bool>(), ev.at("naturalness").get<int>(), ev.value("annotator", "")};
        t.verdicts.push_back(v);
        if (v.meaning_preserved) {
            t.state = TaskState::validated;
        } else {
            ++t.rejections;
            t.state = TaskState::open;
        }
        e.lease_holder.reset();
    } else {
        fail("unknown event type '" + type + "'");
    }
}

void AnnotationService::replay() {
    std::vector<std::filesystem::path> logs;
    for (const auto& f : std::filesystem::directory_iterator(store_dir_)) {
        const std::string name = f.path().filename().string();
        if (f.is_regular_file() && name.size() > 13 && name.substr(name.size() - 13) == ".events.jsonl") {
            logs.push_back(f.path());
        }
    }
    std::sort(logs.begin(), logs.end());
    for (const auto& path : logs) {
        std::ifstream in(path);
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) {
            ++n;
            if (text::trim(line).empty()) continue;
            try {
                const json ev = json::parse(line);
                const std::string qid = ev.at("qid").get<std::string>();
                auto it = entries_.find(qid);
                if (it == entries_.end()) throw SchemaError("event for unknown qid '" + qid + "'");
                apply(it->second, ev, true);
            } catch (const json::exception& e) {
                throw SchemaError("corrupt task store " + path.string() + ":" + std::to_string(n) + ": " + e.what());
            } catch (const SchemaError& e) {
                throw SchemaError(path.string() + ":" + std::to_string(n) + ": " + e.what());
            }
        }
    }
}

namespace {

std::string iso_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

} // namespace

std::optional<ParaphraseTask> AnnotationService::lease_next(const std::string& worker, TaskQueue queue) {
    std::lock_guard lock(mutex_);
    const auto now = clock_();
    const TaskState want = queue == TaskQueue::paraphrase ? TaskState::open : TaskState::submitted;
    for (const auto& e : dataset_) {
        Entry& en = entries_.at(e.qid);
        if (en.task.state != want) continue;
        if (en.lease_holder && en.lease_expiry > now) continue;
        en.lease_holder = worker;
        en.lease_expiry = now + kLease;
        return en.task;
    }
    return std::nullopt;
}

void AnnotationService::release(const std::string& qid) {
    std::lock_guard lock(mutex_);
    entry(qid).lease_holder.reset();
}

ParaphraseTask AnnotationService::task(const std::string& qid) const {
    std::lock_guard lock(mutex_);
    return entry(qid).task;
}

const Example& AnnotationService::example(const std::string& qid) const {
    auto it = index_.find(qid);
    if (it == index_.end()) throw ReferenceError("unknown qid '" + qid + "'");
    return dataset_[it->second];
}

std::vector<ParaphraseTask> AnnotationService::tasks() const {
    std::lock_guard lock(mutex_);
    std::vector<ParaphraseTask> out;
    for (const auto& e : dataset_) out.push_back(entries_.at(e.qid).task);
    return out;
}

double AnnotationService::live_ned(const std::string& qid, const std::string& nl_text) const {
    return normalized_edit_distance(example(qid).pl_question, nl_text);
}

SubmitFeedback AnnotationService::submit_paraphrase(const std::string& qid, const std::string& nl_text,
                                                    const std::string& annotator) {
    if (text::trim(nl_text).empty()) throw ValidationError("paraphrase text is empty");
    std::lock_guard lock(mutex_);
    Entry& en = entry(qid);
    const double ned = normalized_edit_distance(en.task.pl_question, nl_text);
    const int attempt = static_cast<int>(en.task.submissions.size()) + 1;
    const json ev{{"type", "submission"},   {"qid", qid},
                  {"attempt", attempt},     {"nl_text", nl_text},
                  {"ned", ned},             {"diversity_bonus", earns_diversity_bonus(ned)},
                  {"annotator", annotator}, {"timestamp", iso_timestamp(clock_())}};
    apply(en, ev, false);
    append(qid, ev);
    return SubmitFeedback{attempt, ned, earns_diversity_bonus(ned), true};
}

bool AnnotationService::answer_correct(const Example& e, const std::string& text) const {
    static const AnswererSet answerers = make_answerers("table-deterministic");
    static const GoldTypePredictor predictor;
    const StrategyContext ctx{answerers, predictor, TemplateRegistry::builtin()};
    const AnswerList predicted = implicit_decomp(e, text, ctx);
    return list_em_f1(e.answers.values, predicted.values).em == 1.0;
}

AiCheckResult AnnotationService::ai_check(const std::string& qid, std::optional<int> attempt) {
    std::lock_guard lock(mutex_);
    Entry& en = entry(qid);
    auto& subs = en.task.submissions;
    if (subs.empty()) throw StateError("task '" + qid + "' has no submissions to check");
    const int n = attempt.value_or(static_cast<int>(subs.size()));
    if (n < 1 || n > static_cast<int>(subs.size())) {
        throw ValidationError("task '" + qid + "' has no attempt " + std::to_string(n));
    }
    const Example& e = example(qid);
    auto ensure = [&](int k) {
        Submission& s = subs[static_cast<std::size_t>(k - 1)];
        if (!s.ai_correct) {
            const json ev{{"type", "ai_check"}, {"qid", qid}, {"attempt", k}, {"correct", answer_correct(e, s.nl_text)}};
            apply(en, ev, false);
            append(qid, ev);
        }
        return *s.ai_correct;
    };
    AiCheckResult r;
    r.attempt = n;
    r.first_attempt_correct = ensure(1);
    r.this_attempt_correct = ensure(n);
    r.adversarial_bonus = r.first_attempt_correct && !r.this_attempt_correct;
    r.checker = kChecker;
    Submission& s = subs[static_cast<std::size_t>(n - 1)];
    if (s.adversarial_bonus != r.adversarial_bonus) {
        const json ev{{"type", "ai_check"}, {"qid", qid}, {"attempt", n}, {"correct", r.this_attempt_correct},
                      {"adversarial_bonus", r.adversarial_bonus}};
        apply(en, ev, false);
        append(qid, ev);
    }
    return r;
}

TaskState AnnotationService::validate(const std::string& qid, const Verdict& verdict) {
    if (verdict.naturalness < 1 || verdict.naturalness > 5) throw ValidationError("naturalness must be 1-5");
    std::lock_guard lock(mutex_);
    Entry& en = entry(qid);
    const json ev{{"type", "verdict"},
                  {"qid", qid},
                  {"meaning_preserved", verdict.meaning_preserved},
                  {"naturalness", verdict.naturalness},
                  {"annotator", verdict.annotator},
                  {"timestamp", iso_timestamp(clock_())}};
    apply(en, ev, false);
    append(qid, ev);
    return verdict.meaning_preserved ? TaskState::validated : TaskState::rejected;
}

std::vector<Example> AnnotationService::export_dataset() const {
    std::lock_guard lock(mutex_);
    std::vector<Example> out = dataset_;
    for (auto& e : out) {
        const ParaphraseTask& t = entries_.at(e.qid).task;
        if (t.state != TaskState::validated || t.submissions.empty()) continue;
        e.nl_question = t.submissions.back().nl_text;
        e.feedback_checker = kChecker;
    }
    return out;
}

} // namespace mmqa
