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

#include "mmqa/distractor.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include "http_client.hpp"
#include "mmqa/errors.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

std::vector<const Paragraph*> AssembledContext::gold_paragraphs() const {
    std::vector<const Paragraph*> out;
    for (const auto& p : paragraphs) {
        if (p.role == Role::gold) out.push_back(&p);
    }
    return out;
}

std::size_t AssembledContext::image_distractor_count() const {
    std::size_t n = 0;
    for (const auto& img : images) {
        if (std::find(gold_image_ids.begin(), gold_image_ids.end(), img.id) == gold_image_ids.end()) ++n;
    }
    return n;
}

// ---- Scorers ---------------------------------------------------------------

namespace {

std::map<std::string, double> term_counts(std::string_view s) {
    std::map<std::string, double> out;
    for (auto& w : text::words(s)) out[w] += 1.0;
    return out;
}

} // namespace

LexicalScorer::LexicalScorer(const std::vector<std::string>& corpus) : n_docs_(corpus.size()) {
    for (const auto& doc : corpus) {
        for (const auto& [term, count] : term_counts(doc)) ++df_[term];
    }
}

double LexicalScorer::idf(const std::string& term) const {
    if (n_docs_ == 0) return 1.0;
    auto it = df_.find(term);
    const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((static_cast<double>(n_docs_) + 1.0) / (df + 1.0)) + 1.0;
}

double LexicalScorer::score(std::string_view question, std::string_view paragraph) const {
    auto q = term_counts(question);
    auto p = term_counts(paragraph);
    double dot = 0, nq = 0, np = 0;
    for (auto& [t, c] : q) {
        c *= idf(t);
        nq += c * c;
    }
    for (auto& [t, c] : p) {
        c *= idf(t);
        np += c * c;
        if (auto it = q.find(t); it != q.end()) dot += c * it->second;
    }
    if (nq == 0 || np == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(nq) * std::sqrt(np)), 0.0, 1.0);
}

std::vector<double> LexicalScorer::score(std::string_view question, const std::vector<std::string>& paragraphs) const {
    std::vector<double> out;
    out.reserve(paragraphs.size());
    for (const auto& p : paragraphs) out.push_back(score(question, p));
    return out;
}

double lexical_scorer(std::string_view question, std::string_view paragraph) {
    return LexicalScorer().score(question, paragraph);
}

HttpScorer::HttpScorer(std::string endpoint, std::chrono::milliseconds timeout,
                       std::shared_ptr<const RetrievalScorer> fallback)
    : endpoint_(std::move(endpoint)), timeout_(timeout), fallback_(std::move(fallback)) {}

std::vector<double> HttpScorer::score(std::string_view question, const std::vector<std::string>& paragraphs) const {
    nlohmann::json request = {{"question", question}, {"paragraphs", paragraphs}};
    auto result = detail::post_json(endpoint_, request, timeout_);
    if (result.body && result.body->contains("scores") && (*result.body)["scores"].is_array() &&
        (*result.body)["scores"].size() == paragraphs.size()) {
        try {
            return (*result.body)["scores"].get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            result.error = e.what();
        }
    } else if (result.error.empty()) {
        result.error = "response lacks a scores array of the right length";
    }
    std::cerr << "warning: scorer " << endpoint_ << " failed (" << result.error << "); using lexical scores\n";
    return fallback_->score(question, paragraphs);
}

// ---- Ledger ----------------------------------------------------------------

bool DistractorLedger::blocked(Partition partition, const std::string& paragraph_id) const {
    return (partition == Partition::train ? eval_ : train_).count(paragraph_id) > 0;
}

void DistractorLedger::record(Partition partition, const std::string& paragraph_id) {
    (partition == Partition::train ? train_ : eval_).insert(paragraph_id);
}

const std::set<std::string>& DistractorLedger::used(Partition partition) const {
    return partition == Partition::train ? train_ : eval_;
}

std::string_view to_string(Partition partition) {
    return partition == Partition::train ? "train" : "eval";
}

// ---- Selection -------------------------------------------------------------

bool leaks_answer(std::string_view paragraph, const AnswerList& answers) {
    const std::string hay = text::normalize_for_match(paragraph);
    auto leaks = [&](const std::string& needle) {
        const std::string n = text::normalize_for_match(needle);
        return !n.empty() && hay.find(n) != std::string::npos;
    };
    for (const auto& v : answers.values) {
        if (leaks(v)) return true;
    }
    if (answers.entity_titles) {
        for (const auto& t : *answers.entity_titles) {
            if (leaks(t)) return true;
        }
    }
    return false;
}

std::string distractor_exclusion(const Paragraph& candidate, const TextDistractorRequest& request,
                                 const DistractorLedger& ledger) {
    for (const auto& g : request.gold) {
        if (g.id == candidate.id) return "gold paragraph";
        if (text::normalize_for_match(g.article_title) == text::normalize_for_match(candidate.article_title)) {
            return "gold article";
        }
    }
    if (ledger.blocked(request.partition, candidate.id)) return "used in the other partition";
    if (leaks_answer(candidate.text, request.answers)) return "contains the answer";
    return {};
}

std::vector<Paragraph> select_text_distractors(const TextDistractorRequest& request, const std::vector<Paragraph>& pool,
                                               const RetrievalScorer& scorer, DistractorLedger& ledger) {
    if (request.gold.empty() || request.gold.size() > 2) {
        throw ValidationError("an example needs 1-2 gold paragraphs, got " + std::to_string(request.gold.size()));
    }
    std::set<std::string> gold_ids;
    for (const auto& g : request.gold) {
        if (!gold_ids.insert(g.id).second) throw ValidationError("duplicate gold paragraph id '" + g.id + "'");
    }

    std::vector<const Paragraph*> eligible;
    std::set<std::string> seen;
    for (const auto& p : pool) {
        if (!seen.insert(p.id).second) continue;
        if (distractor_exclusion(p, request, ledger).empty()) eligible.push_back(&p);
    }
    const std::size_t needed = kContextParagraphs - request.gold.size();
    if (eligible.size() < needed) {
        throw ValidationError("only " + std::to_string(eligible.size()) + " eligible distractor paragraphs, need " +
                              std::to_string(needed));
    }

    std::vector<std::string> texts;
    texts.reserve(eligible.size());
    for (const auto* p : eligible) texts.push_back(p->text);
    const auto scores = scorer.score(request.question, texts);
    if (scores.size() != eligible.size()) throw Error("scorer returned the wrong number of scores");

    std::vector<std::size_t> order(eligible.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return eligible[a]->id < eligible[b]->id;
    });

    std::vector<Paragraph> out;
    for (const auto& g : request.gold) {
        Paragraph p = g;
        p.role = Role::gold;
        out.push_back(std::move(p));
    }
    for (std::size_t i = 0; i < needed; ++i) {
        Paragraph p = *eligible[order[i]];
        p.role = Role::distractor;
        ledger.record(request.partition, p.id);
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const Paragraph& a, const Paragraph& b) { return a.id < b.id; });
    return out;
}

std::vector<ImageRef> select_image_distractors(const std::vector<ImageRef>& candidates,
                                               const std::set<std::string>& gold_image_ids, std::uint64_t seed) {
    std::vector<ImageRef> pool;
    std::set<std::string> seen;
    for (const auto& img : candidates) {
        if (gold_image_ids.count(img.id) || !seen.insert(img.id).second) continue;
        pool.push_back(img);
    }
    std::sort(pool.begin(), pool.end(), [](const ImageRef& a, const ImageRef& b) { return a.id < b.id; });
    std::mt19937_64 rng(seed);
    std::shuffle(pool.begin(), pool.end(), rng);
    if (pool.size() > kMaxImageDistractors) pool.resize(kMaxImageDistractors);
    std::sort(pool.begin(), pool.end(), [](const ImageRef& a, const ImageRef& b) { return a.id < b.id; });
    return pool;
}

std::vector<ImageRef> table_entity_images(const Context& context) {
    std::vector<ImageRef> out;
    std::set<std::string> seen;
    for (const auto& title : context.table_entities()) {
        const WikiEntity* e = context.find_entity(title);
        if (!e || !e->image_id) continue;
        const ImageRef* img = context.find_image(*e->image_id);
        if (img && seen.insert(img->id).second) out.push_back(*img);
    }
    for (const auto& row : context.table.rows) {
        for (const auto& cell : row) {
            if (!cell.image_id) continue;
            const ImageRef* img = context.find_image(*cell.image_id);
            if (img && seen.insert(img->id).second) out.push_back(*img);
        }
    }
    return out;
}

} // namespace mmqa
