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

#include "mmqa/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/serialization.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

namespace {

std::uint64_t mix(std::uint64_t seed, std::string_view key) { return seed ^ text::fnv1a(key); }

} // namespace

std::vector<AtomicQuestion> build_atomic_bank(const Corpus& corpus, const Context& context,
                                              const GenerateConfig& config, GenerateReport* report) {
    std::vector<AtomicQuestion> bank;
    TableQuestionConfig tc = config.table;
    tc.seed = mix(config.seed, context.id);
    for (auto& q : gen_table_lookup_questions(context.table, tc)) bank.push_back(std::move(q));
    for (auto& q : gen_table_superlative_questions(context.table, tc)) bank.push_back(std::move(q));

    std::vector<ImageBankRecord> records;
    for (const auto& r : corpus.image_bank) {
        if (r.context_id == context.id) records.push_back(r);
    }
    for (auto& q : ingest_image_questions(records, context, corpus.vocabulary, corpus.blocklist)) {
        bank.push_back(std::move(q));
    }

    IngestReport ingest;
    const auto linked = link_triples(corpus.triples, context);
    for (auto& q : ingest_text_questions(linked, corpus.entity_titles(), &ingest)) bank.push_back(std::move(q));
    if (report) {
        for (const auto& s : ingest.skipped) report->skipped_questions.push_back({s.id, s.reason});
        report->atomic_questions += bank.size();
    }
    return bank;
}

std::vector<Paragraph> gold_paragraphs_for(const Program& program, const Context& context,
                                           const std::vector<RCTriple>& triples) {
    std::map<std::string, const Paragraph*> known;
    for (const auto& t : triples) {
        for (const auto& p : t.gold_paragraphs) known.emplace(p.id, &p);
    }
    for (const auto& p : context.paragraphs) known[p.id] = &p;

    std::vector<Paragraph> out;
    std::set<std::string> seen;
    for (const auto* leaf : program.leaves()) {
        if (leaf->modality != Modality::text) continue;
        for (const auto& id : leaf->anchors.paragraph_ids) {
            auto it = known.find(id);
            if (it == known.end()) throw ReferenceError("unknown gold paragraph '" + id + "'");
            if (!seen.insert(id).second) continue;
            Paragraph p = *it->second;
            p.role = Role::gold;
            out.push_back(std::move(p));
        }
    }
    if (out.empty()) {
        for (const auto& p : context.paragraphs) {
            if (p.role == Role::gold) out.push_back(p);
        }
    }
    return out;
}

std::vector<ImageRef> gold_images_for(const Program& program, const Context& context) {
    std::vector<ImageRef> out;
    std::set<std::string> seen;
    for (const auto* leaf : program.leaves()) {
        if (leaf->modality != Modality::image && leaf->modality != Modality::image_list) continue;
        for (const auto& id : leaf->anchors.image_ids) {
            const ImageRef* img = context.find_image(id);
            if (!img) throw ReferenceError("unknown gold image '" + id + "'");
            if (seen.insert(id).second) out.push_back(*img);
        }
    }
    std::sort(out.begin(), out.end(), [](const ImageRef& a, const ImageRef& b) { return a.id < b.id; });
    return out;
}

std::vector<Example> generate_examples(const Corpus& corpus, const TemplateRegistry& registry,
                                       const GenerateConfig& config, GenerateReport* report) {
    std::vector<Example> out;
    std::set<std::string> qids;
    for (const auto& context : corpus.contexts) {
        if (config.apply_filter && !filter_table(context, config.filter)) {
            if (report) report->skipped_contexts.push_back({context.id, "outside the table filter"});
            continue;
        }
        const auto bank = build_atomic_bank(corpus, context, config, report);
        const auto composed =
            instantiate_templates(context, bank, registry, {mix(config.seed, context.id), config.max_per_template});
        for (const auto& cq : composed) {
            const std::string key = canonical_program_key(cq.program);
            Example e;
            e.qid = context.id + "-" + text::hex_digest(text::fnv1a(key));
            e.pl_question = cq.pl_text;
            e.program = cq.program;
            e.question_type = cq.program.question_type;
            e.answers = cq.answers;
            e.intermediate_answers = cq.intermediate_answers;
            e.multimodal = compute_multimodal(e.program);
            e.compositional = compute_compositional(e.program);
            auto gold = gold_paragraphs_for(cq.program, context, corpus.triples);
            if (gold.empty() || gold.size() > 2) {
                if (report) {
                    report->skipped_questions.push_back(
                        {e.qid, "needs 1-2 gold paragraphs, has " + std::to_string(gold.size())});
                }
                continue;
            }
            std::sort(gold.begin(), gold.end(), [](const Paragraph& a, const Paragraph& b) { return a.id < b.id; });
            e.context.context_id = context.id;
            e.context.table = context.table;
            e.context.paragraphs = std::move(gold);
            e.context.images = gold_images_for(cq.program, context);
            for (const auto& img : e.context.images) e.context.gold_image_ids.push_back(img.id);
            validate_example(e);
            if (!qids.insert(e.qid).second) continue;
            out.push_back(std::move(e));
        }
    }
    return out;
}

bool needs_image_distractors(const std::string& question_type) {
    std::size_t pos = 0;
    while ((pos = question_type.find("ImageQ", pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(question_type[pos - 1]));
        const std::size_t end = pos + 6;
        const bool right_ok = end == question_type.size() || !std::isalnum(static_cast<unsigned char>(question_type[end]));
        if (left_ok && right_ok) return true;
        pos = end;
    }
    return false;
}

void distract_examples(std::vector<Example>& examples, const Corpus& corpus, const RetrievalScorer& scorer,
                       std::uint64_t seed) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (!examples[i].split) throw ValidationError("example '" + examples[i].qid + "' has no split");
        if (*examples[i].split != Split::train) order.push_back(i);
    }
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (*examples[i].split == Split::train) order.push_back(i);
    }

    DistractorLedger ledger;
    for (std::size_t i : order) {
        Example& e = examples[i];
        const Context* context = corpus.find_context(e.context.context_id);
        if (!context) throw ReferenceError("unknown context '" + e.context.context_id + "'");

        TextDistractorRequest req;
        req.question = e.pl_question;
        req.answers = e.answers;
        for (const auto* g : e.context.gold_paragraphs()) req.gold.push_back(*g);
        req.partition = *e.split == Split::train ? Partition::train : Partition::eval;

        std::vector<Paragraph> pool = corpus.pool;
        std::set<std::string> gold_ids;
        for (const auto& g : req.gold) gold_ids.insert(g.id);
        for (const auto& p : context->paragraphs) {
            if (!gold_ids.count(p.id)) pool.push_back(p);
        }
        e.context.paragraphs = select_text_distractors(req, pool, scorer, ledger);

        std::vector<ImageRef> images;
        std::set<std::string> gold_images(e.context.gold_image_ids.begin(), e.context.gold_image_ids.end());
        for (const auto& img : e.context.images) {
            if (gold_images.count(img.id)) images.push_back(img);
        }
        if (needs_image_distractors(e.question_type)) {
            for (auto& img : select_image_distractors(table_entity_images(*context), gold_images, mix(seed, e.qid))) {
                images.push_back(std::move(img));
            }
        }
        std::sort(images.begin(), images.end(), [](const ImageRef& a, const ImageRef& b) { return a.id < b.id; });
        e.context.images = std::move(images);
    }
}

std::string config_hash(const Corpus& corpus, const TemplateRegistry& registry, const GenerateConfig& config) {
    json j;
    j["seed"] = config.seed;
    j["max_per_template"] = config.max_per_template;
    j["table"] = {{"max_lookup", config.table.max_lookup_questions},
                  {"max_superlative", config.table.max_superlative_questions},
                  {"max_condition_row_fraction", config.table.max_condition_row_fraction}};
    j["filter"] = {{"apply", config.apply_filter},
                   {"min_rows", config.filter.min_rows},
                   {"max_rows", config.filter.max_rows},
                   {"min_images", config.filter.min_images}};
    j["templates"] = registry.labels();
    std::uint64_t h = text::fnv1a(j.dump());
    for (const auto& c : corpus.contexts) h = text::fnv1a(context_to_json(c).dump(), h);
    for (const auto& t : corpus.triples) h = text::fnv1a(t.id + "\n" + t.question, h);
    for (const auto& r : corpus.image_bank) h = text::fnv1a(r.id + "\n" + r.question, h);
    for (const auto& p : corpus.pool) h = text::fnv1a(p.id + "\n" + p.text, h);
    return text::hex_digest(h);
}

std::vector<Prediction> predict_dataset(const std::vector<Example>& examples, Strategy strategy,
                                        const StrategyContext& ctx, bool use_nl) {
    std::vector<Prediction> out;
    out.reserve(examples.size());
    for (const auto& e : examples) {
        const std::string q = use_nl && e.nl_question ? *e.nl_question : e.pl_question;
        Prediction p{e.qid, {}};
        try {
            p.answers = run_strategy(strategy, e, q, ctx).values;
        } catch (const Error&) {
        }
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace mmqa
