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


// Prints one PASS/FAIL line per acceptance criterion and exits non-zero on
// any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmqa/composer.hpp"
#include "mmqa/context_model.hpp"
#include "mmqa/distractor.hpp"
#include "mmqa/evaluator.hpp"
#include "mmqa/executor.hpp"
#include "mmqa/pipeline.hpp"
#include "mmqa/serialization.hpp"
#include "mmqa/templates.hpp"
#include "mmqa/text.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mmqa;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
    std::vector<std::string> problems;

    void fail(const std::string& why) {
        pass = false;
        if (problems.size() < 5) problems.push_back(why);
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> keys_of(const AnswerList& a) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a.entity_titles ? (*a.entity_titles)[i] : a.values[i]);
    return out;
}

std::set<std::string> squeezed(const std::vector<std::string>& xs) {
    std::set<std::string> out;
    for (const auto& x : xs) out.insert(oracle::squeeze(x));
    return out;
}

// ---- Generation soundness ---------------------------------------------------

void check_leaf_source(const AtomicQuestion& q, const Corpus& corpus, Verdict& v, const std::string& qid) {
    if (q.modality == Modality::text) {
        auto it = std::find_if(corpus.triples.begin(), corpus.triples.end(), [&](const auto& t) { return t.id == q.id; });
        if (it == corpus.triples.end()) return v.fail(qid + ": text leaf " + q.id + " has no source triple");
        if (q.answers.values != it->answers) v.fail(qid + ": text leaf " + q.id + " answers differ from its triple");
    } else if (q.modality == Modality::image || q.modality == Modality::image_list) {
        auto it = std::find_if(corpus.image_bank.begin(), corpus.image_bank.end(),
                               [&](const auto& r) { return r.id == q.id; });
        if (it == corpus.image_bank.end()) return v.fail(qid + ": image leaf " + q.id + " has no bank record");
        if (squeezed(keys_of(q.answers)) != squeezed(it->answers) || q.answers.size() != it->answers.size()) {
            v.fail(qid + ": image leaf " + q.id + " answers differ from its bank record");
        }
    }
}

void collect_leaves(const Program& p, std::vector<const AtomicQuestion*>& out) {
    if (p.atomic) out.push_back(&*p.atomic);
    for (const auto& c : p.children) collect_leaves(c, out);
}

Verdict generation_soundness() {
    Verdict v;
    const auto start = Clock::now();
    const auto& data = testing::mini_dataset();
    const auto& corpus = testing::mini_corpus();
    std::set<Modality> modalities;
    std::set<std::string> contexts;
    std::size_t violations = 0;
    for (const auto& e : data.examples) {
        contexts.insert(e.context.context_id);
        std::vector<const AtomicQuestion*> leaves;
        collect_leaves(e.program, leaves);
        for (const auto* q : leaves) {
            modalities.insert(q->modality);
            check_leaf_source(*q, corpus, v, e.qid);
        }
        const auto got = oracle::run(e.program, e.context.table);
        if (!got) {
            ++violations;
            v.fail(e.qid + ": brute-force execution rejects the program");
            continue;
        }
        if (got->answers != e.answers) {
            ++violations;
            v.fail(e.qid + ": stored answers differ from brute-force execution");
        }
        if (got->intermediate != e.intermediate_answers) {
            ++violations;
            v.fail(e.qid + ": stored intermediates differ from brute-force execution");
        }
    }
    const double elapsed = seconds_since(start);
    if (!v.pass && violations == 0) violations = v.problems.size();
    if (data.examples.empty()) v.fail("no examples generated");
    if (contexts.size() < 5) v.fail("only " + std::to_string(contexts.size()) + " contexts used");
    if (modalities.size() != 4) v.fail("leaves span " + std::to_string(modalities.size()) + " of 4 modalities");
    if (elapsed >= 10.0) v.fail("runtime " + std::to_string(elapsed) + " s");
    std::ostringstream d;
    d << data.examples.size() << " examples over " << contexts.size() << " contexts, " << violations
      << " violations, " << elapsed << " s";
    v.detail = d.str();
    return v;
}

// ---- Strategy ordering ------------------------------------------------------

Verdict strategy_ordering() {
    Verdict v;
    const auto& examples = testing::mini_dataset().examples;
    const auto answerers = make_answerers("oracle");
    GoldTypePredictor predictor;
    StrategyContext ctx{answerers, predictor};
    const auto implicit = evaluate(examples, predict_dataset(examples, Strategy::implicitdecomp, ctx));
    const auto automatic = evaluate(examples, predict_dataset(examples, Strategy::autorouting, ctx));
    if (implicit.single_modality.count == 0 || implicit.multi_modality.count == 0) v.fail("a bucket is empty");
    for (const auto* b : {&implicit.single_modality, &implicit.multi_modality, &implicit.all}) {
        if (b->em != 1.0) v.fail("implicitdecomp EM " + std::to_string(b->em) + " below 1.00");
    }
    if (automatic.single_modality.em != 1.0) v.fail("autorouting single-modality EM below 1.00");
    if (automatic.multi_modality.em > 0.50) v.fail("autorouting multi-modality EM above 0.50");
    std::ostringstream d;
    d << "implicitdecomp EM single/multi/all " << implicit.single_modality.em << "/" << implicit.multi_modality.em
      << "/" << implicit.all.em << "; autorouting EM single " << automatic.single_modality.em << ", multi "
      << automatic.multi_modality.em << " (n=" << implicit.single_modality.count << "/"
      << implicit.multi_modality.count << ")";
    v.detail = d.str();
    return v;
}

// ---- Evaluator correctness --------------------------------------------------

void all_lists(const std::vector<std::string>& alphabet, std::size_t max_len, std::size_t min_len,
               std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::vector<std::size_t>> frontier{{}};
    for (std::size_t len = 0; len <= max_len; ++len) {
        if (len >= min_len) out.insert(out.end(), frontier.begin(), frontier.end());
        std::vector<std::vector<std::size_t>> next;
        for (const auto& f : frontier) {
            for (std::size_t t = 0; t < alphabet.size(); ++t) {
                auto g = f;
                g.push_back(t);
                next.push_back(std::move(g));
            }
        }
        frontier = std::move(next);
    }
}

std::vector<std::string> materialize(const std::vector<std::size_t>& idx, const std::vector<std::string>& alphabet) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(alphabet[i]);
    return out;
}

// Exhaustive comparison; pair scores come from the oracle once per alphabet.
std::size_t exhaustive(const std::vector<std::string>& alphabet, std::size_t& cases, Verdict& v) {
    const std::size_t k = alphabet.size();
    std::vector<std::vector<double>> score(k + 1, std::vector<double>(k + 1));
    for (std::size_t i = 0; i <= k; ++i) {
        for (std::size_t j = 0; j <= k; ++j) {
            score[i][j] = oracle::pair_f1(i < k ? alphabet[i] : "", j < k ? alphabet[j] : "");
        }
    }
    std::vector<std::vector<std::size_t>> golds, preds;
    all_lists(alphabet, 4, 1, golds);
    all_lists(alphabet, 4, 0, preds);
    std::size_t bad = 0;
    for (const auto& g : golds) {
        const auto gs = materialize(g, alphabet);
        for (const auto& p : preds) {
            const std::size_t n = std::max(g.size(), p.size());
            std::vector<std::size_t> gi = g, pi = p;
            gi.resize(n, k);
            pi.resize(n, k);
            std::vector<std::size_t> perm(n);
            for (std::size_t i = 0; i < n; ++i) perm[i] = i;
            double best = 0;
            do {
                double total = 0;
                for (std::size_t i = 0; i < n; ++i) total += score[gi[i]][pi[perm[i]]];
                best = std::max(best, total);
            } while (std::next_permutation(perm.begin(), perm.end()));
            best /= static_cast<double>(n);
            const auto ps = materialize(p, alphabet);
            const auto got = list_em_f1(gs, ps);
            const bool em = oracle::multiset_em(gs, ps);
            ++cases;
            if (std::abs(got.f1 - best) > 1e-9 || (got.em == 1.0) != em || (em && std::abs(got.f1 - 1.0) > 1e-9)) {
                ++bad;
                v.fail("list_em_f1 mismatch on a " + std::to_string(g.size()) + "x" + std::to_string(p.size()) +
                       " case: got " + std::to_string(got.f1) + ", brute force " + std::to_string(best));
            }
        }
    }
    return bad;
}

Verdict evaluator_correctness() {
    Verdict v;
    std::size_t cases = 0, bad = 0;
    bad += exhaustive({"red", "fox", "blue", "sky", "tree"}, cases, v);
    bad += exhaustive({"red fox", "the red fox jumps", "blue sky", "Red, Blue", "fox"}, cases, v);

    const std::vector<std::string> vocab = {"Back to Love", "TY.O", "Hammer & Sickle", "The Godfather", "godfather",
                                            "Kathy Vaughn",  "1957", "1,957",          "yes",           "no",
                                            "a dangerous age", "Junie Moon", "moon", "love"};
    std::mt19937_64 rng(20260);
    std::size_t perm_bad = 0;
    for (int c = 0; c < 1000; ++c) {
        std::uniform_int_distribution<std::size_t> glen(1, 6), plen(0, 6), pick(0, vocab.size() - 1);
        std::vector<std::string> gold(glen(rng)), pred(plen(rng));
        for (auto& s : gold) s = vocab[pick(rng)];
        for (auto& s : pred) s = vocab[pick(rng)];
        const auto base = list_em_f1(gold, pred);
        auto g2 = gold, p2 = pred;
        std::shuffle(g2.begin(), g2.end(), rng);
        std::shuffle(p2.begin(), p2.end(), rng);
        const auto shuffled = list_em_f1(g2, p2);
        const double brute = oracle::brute_list_f1(gold, pred);
        if (std::abs(base.f1 - shuffled.f1) > 1e-9 || base.em != shuffled.em || std::abs(base.f1 - brute) > 1e-9) {
            ++perm_bad;
            v.fail("permutation case " + std::to_string(c) + " differs");
        }
    }
    std::ostringstream d;
    d << cases << " exhaustive pairs with " << bad << " mismatches (tol 1e-9); 1000 permutation cases with "
      << perm_bad << " mismatches";
    v.detail = d.str();
    return v;
}

// ---- Context constraints ----------------------------------------------------

Verdict context_constraints() {
    Verdict v;
    const auto& examples = testing::mini_dataset().examples;
    std::set<std::string> train_ids, eval_ids;
    std::size_t max_images = 0;
    for (const auto& e : examples) {
        const auto& c = e.context;
        if (c.paragraphs.size() != 10) v.fail(e.qid + ": " + std::to_string(c.paragraphs.size()) + " paragraphs");
        std::set<std::string> gold_articles;
        std::size_t gold = 0;
        for (const auto& p : c.paragraphs) {
            if (p.role == Role::gold) {
                ++gold;
                gold_articles.insert(oracle::squeeze(p.article_title));
            }
        }
        if (gold < 1 || gold > 2) v.fail(e.qid + ": " + std::to_string(gold) + " gold paragraphs");
        const std::set<std::string> gold_images(c.gold_image_ids.begin(), c.gold_image_ids.end());
        std::size_t image_distractors = 0;
        for (const auto& img : c.images) image_distractors += gold_images.count(img.id) ? 0 : 1;
        max_images = std::max(max_images, image_distractors);
        if (image_distractors > 15) v.fail(e.qid + ": " + std::to_string(image_distractors) + " image distractors");
        for (const auto& p : c.paragraphs) {
            if (p.role != Role::distractor) continue;
            if (gold_articles.count(oracle::squeeze(p.article_title))) v.fail(e.qid + ": distractor " + p.id + " from a gold article");
            const std::string body = oracle::squeeze(p.text);
            for (const auto& a : e.answers.values) {
                const auto needle = oracle::squeeze(a);
                if (!needle.empty() && body.find(needle) != std::string::npos) {
                    v.fail(e.qid + ": distractor " + p.id + " contains the answer '" + a + "'");
                }
            }
            (e.split == Split::train ? train_ids : eval_ids).insert(p.id);
        }
    }
    std::vector<std::string> shared;
    std::set_intersection(train_ids.begin(), train_ids.end(), eval_ids.begin(), eval_ids.end(),
                          std::back_inserter(shared));
    if (!shared.empty()) v.fail(std::to_string(shared.size()) + " distractor ids shared by train and eval");
    std::ostringstream d;
    d << examples.size() << " examples audited; max image distractors " << max_images << "; " << train_ids.size()
      << " train and " << eval_ids.size() << " eval distractor ids, " << shared.size() << " shared";
    v.detail = d.str();
    return v;
}

// ---- Column classification --------------------------------------------------

SemanticType label_from(const std::string& name) { return semantic_type_from_string(name); }

Verdict column_classification() {
    Verdict v;
    std::ifstream in(testing::fixtures_dir() / "columns40.json");
    const json fixture = json::parse(in);
    std::size_t agree = 0;
    for (const auto& col : fixture) {
        const auto cells = col.at("cells").get<std::vector<std::string>>();
        const auto expected = label_from(col.at("label").get<std::string>());
        const auto got = classify_column(cells);
        const auto ref = oracle::label_column(cells);
        if (got == expected && ref == expected) {
            ++agree;
        } else {
            v.fail(col.at("name").get<std::string>() + ": label " + std::string(to_string(expected)) + ", core " +
                   std::string(to_string(got)) + ", oracle " + std::string(to_string(ref)));
        }
    }
    if (fixture.size() != 40) v.fail("fixture holds " + std::to_string(fixture.size()) + " columns");
    v.detail = std::to_string(agree) + "/" + std::to_string(fixture.size()) + " columns agree";
    return v;
}

// ---- Table-answer cross-oracle ----------------------------------------------

std::vector<TablePredicate> all_predicates(const Table& t) {
    std::vector<TablePredicate> out;
    const std::size_t n = t.column_count();
    for (std::size_t x = 0; x < n; ++x) {
        const auto type = t.columns[x].semantic_type;
        const bool ordered = type == SemanticType::date || type == SemanticType::numeric;
        if (ordered) {
            for (auto op : {Extremum::min, Extremum::max}) out.push_back({x, std::nullopt, std::nullopt, op});
        }
        for (std::size_t z = 0; z < n; ++z) {
            if (z == x) continue;
            std::set<std::string> values;
            for (const auto& row : t.rows) {
                if (!text::trim(row[z].text).empty()) values.insert(row[z].text);
            }
            for (const auto& y : values) {
                out.push_back({x, z, y, std::nullopt});
                if (ordered) {
                    for (auto op : {Extremum::min, Extremum::max}) out.push_back({x, z, y, op});
                }
            }
        }
    }
    return out;
}

Verdict table_answer_cross_oracle() {
    Verdict v;
    std::size_t checked = 0, disagreements = 0, tables = 0;
    for (const auto& ctx : testing::mini_corpus().contexts) {
        ++tables;
        for (const auto& p : all_predicates(ctx.table)) {
            const auto composer = execute_table_predicate(ctx.table, p);
            const auto executor = table_answer(ctx.table, p, Aggregation::none);
            const auto reference = oracle::predicate_answers(ctx.table, p);
            ++checked;
            if (composer != executor || composer != reference) {
                ++disagreements;
                v.fail(ctx.id + ": predicate on column " + std::to_string(p.target_column) + " disagrees");
            }
        }
    }
    v.detail = std::to_string(checked) + " predicates over " + std::to_string(tables) + " tables, " +
               std::to_string(disagreements) + " disagreements";
    return v;
}

// ---- Operation properties ---------------------------------------------------

Context random_context(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nrows(6, 14), year(1950, 2020), month(1, 12), day(1, 28);
    Context c;
    c.id = "synthetic";
    c.table.page_title = "Synthetic";
    c.table.table_title = "Records";
    c.table.columns = {{"Name", SemanticType::text, 0}, {"Year", SemanticType::numeric, 1},
                       {"Released", SemanticType::date, 2}};
    const int rows = nrows(rng);
    for (int r = 0; r < rows; ++r) {
        const std::string name = "Entity " + std::to_string(r);
        c.entities.push_back({name, std::nullopt});
        const std::string y = std::to_string(year(rng));
        const std::string released = std::to_string(day(rng)) + " " +
                                     std::vector<std::string>{"January", "February", "March",     "April",
                                                              "May",     "June",     "July",      "August",
                                                              "September", "October", "November", "December"}
                                         [static_cast<std::size_t>(month(rng) - 1)] +
                                     " " + y;
        c.table.rows.push_back({Cell{name, {name}, std::nullopt}, Cell{y, {}, std::nullopt},
                                Cell{released, {}, std::nullopt}});
    }
    return c;
}

AtomicQuestion leaf_with(const std::string& id, Modality m, AnswerList answers) {
    AtomicQuestion q;
    q.id = id;
    q.modality = m;
    q.pl_text = "Which entity matches " + id + "?";
    q.answer_kind = answers.is_entity_list() ? AnswerKind::entity : AnswerKind::string;
    q.answers = std::move(answers);
    return q;
}

Verdict operation_properties() {
    Verdict v;
    const std::vector<Modality> modalities = {Modality::table, Modality::text, Modality::image, Modality::image_list};
    std::size_t identity = 0, commutative = 0, antisymmetric = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        std::mt19937_64 rng(seed);
        const Context ctx = random_context(rng);
        const std::size_t rows = ctx.table.row_count();
        std::uniform_int_distribution<std::size_t> row(0, rows - 1), mod(0, 3);
        auto title = [&](std::size_t r) { return ctx.table.rows[r][0].text; };

        // Compose identity.
        {
            const std::string e = title(row(rng));
            AtomicQuestion outer = leaf_with("outer", modalities[mod(rng)],
                                             AnswerList::strings({"answer " + std::to_string(seed)}));
            outer.pl_text = "Who directed " + e + "?";
            outer.mentions = {{e, e}};
            const auto inner = Program::leaf(leaf_with("inner", modalities[mod(rng)], AnswerList::entities({e})));
            const auto composed = execute(Program::compose(Program::leaf(outer), inner), ctx);
            const auto alone = execute(Program::leaf(outer), ctx);
            const auto ref = oracle::run(Program::compose(Program::leaf(outer), inner), ctx.table);
            if (composed.answers == alone.answers && ref && ref->answers == alone.answers) {
                ++identity;
            } else {
                v.fail("seed " + std::to_string(seed) + ": compose identity");
            }
        }
        // Intersect commutativity.
        {
            std::vector<std::size_t> order(rows);
            for (std::size_t i = 0; i < rows; ++i) order[i] = i;
            std::shuffle(order.begin(), order.end(), rng);
            std::uniform_int_distribution<std::size_t> len(2, std::min<std::size_t>(5, rows - 1));
            const std::size_t la = len(rng), lb = len(rng);
            std::vector<std::string> a;
            for (std::size_t i = 0; i < la; ++i) a.push_back(title(order[i]));
            // b always shares order[0] with a.
            std::vector<std::string> b = {title(order[0])};
            std::uniform_int_distribution<std::size_t> any(1, rows - 1);
            while (b.size() < lb) {
                const auto t = title(order[any(rng)]);
                if (std::find(b.begin(), b.end(), t) == b.end()) b.push_back(t);
            }
            std::shuffle(b.begin(), b.end(), rng);
            const auto pa = Program::leaf(leaf_with("a", modalities[mod(rng)], AnswerList::entities(a)));
            const auto pb = Program::leaf(leaf_with("b", modalities[mod(rng)], AnswerList::entities(b)));
            const auto ab = execute(Program::intersect(pa, pb), ctx).answers;
            const auto ba = execute(Program::intersect(pb, pa), ctx).answers;
            std::set<std::string> expect;
            for (const auto& x : a) {
                if (std::find(b.begin(), b.end(), x) != b.end()) expect.insert(oracle::squeeze(x));
            }
            if (squeezed(keys_of(ab)) == squeezed(keys_of(ba)) && squeezed(keys_of(ab)) == expect) {
                ++commutative;
            } else {
                v.fail("seed " + std::to_string(seed) + ": intersect commutativity");
            }
        }
        // Compare antisymmetry.
        {
            const std::size_t column = 1 + (rng() % 2);
            std::size_t r1 = row(rng), r2 = row(rng);
            for (int tries = 0; tries < 100 && (r1 == r2 || oracle::sort_key(ctx.table.columns[column].semantic_type,
                                                                             ctx.table.rows[r1][column].text) ==
                                                                 oracle::sort_key(ctx.table.columns[column].semantic_type,
                                                                                  ctx.table.rows[r2][column].text));
                 ++tries) {
                r2 = row(rng);
            }
            const auto left = Program::leaf(leaf_with("l", modalities[mod(rng)], AnswerList::entities({title(r1)})));
            const auto right = Program::leaf(leaf_with("r", modalities[mod(rng)], AnswerList::entities({title(r2)})));
            const auto lo = execute(Program::compare(left, right, column, Extremum::min), ctx).answers;
            const auto hi = execute(Program::compare(left, right, column, Extremum::max), ctx).answers;
            const auto ref_hi = oracle::run(Program::compare(left, right, column, Extremum::max), ctx.table);
            const std::set<std::string> both = {title(r1), title(r2)};
            const std::set<std::string> got = {keys_of(lo).front(), keys_of(hi).front()};
            if (lo != hi && got == both && ref_hi && ref_hi->answers == hi) {
                ++antisymmetric;
            } else {
                v.fail("seed " + std::to_string(seed) + ": compare antisymmetry");
            }
        }
    }
    std::ostringstream d;
    d << "500 seeds: compose identity " << identity << ", intersect commutativity " << commutative
      << ", compare antisymmetry " << antisymmetric;
    v.detail = d.str();
    return v;
}

// ---- Stats engine -------------------------------------------------------------

void compare_json(const json& want, const json& got, const std::string& path, Verdict& v, std::size_t& fields) {
    if (want.is_object()) {
        if (!got.is_object()) return v.fail(path + " is not an object");
        for (const auto& [k, w] : want.items()) {
            if (!got.contains(k)) {
                v.fail(path + "/" + k + " missing");
                continue;
            }
            compare_json(w, got.at(k), path + "/" + k, v, fields);
        }
        for (const auto& [k, g] : got.items()) {
            if (!want.contains(k)) v.fail(path + "/" + k + " not in the golden file");
        }
        return;
    }
    ++fields;
    if (want.is_number() && got.is_number()) {
        if (std::abs(want.get<double>() - got.get<double>()) > 1e-9) v.fail(path + " differs");
    } else if (want != got) {
        v.fail(path + " differs");
    }
}

Verdict stats_engine() {
    Verdict v;
    const auto examples = read_jsonl(testing::fixtures_dir() / "stats10.jsonl");
    std::ifstream in(testing::fixtures_dir() / "stats10.golden.json");
    const json golden = json::parse(in);
    std::size_t fields = 0;
    compare_json(golden, stats_to_json(compute_stats(examples)), "", v, fields);
    const ReferenceStats reference;
    if (reference.n_questions != 29918 || reference.pct_list_answers != 7.4 || reference.pct_list_intermediate != 18.9) {
        v.fail("reference constants changed");
    }
    std::ostringstream d;
    d << examples.size() << " examples, " << fields << " fields match (reference: " << reference.n_questions
      << " questions, " << reference.pct_list_answers << "% list answers, " << reference.pct_list_intermediate
      << "% list intermediates)";
    v.detail = d.str();
    return v;
}

// ---- Determinism --------------------------------------------------------------

void write_run(const fs::path& dir) {
    const auto& corpus = testing::mini_corpus();
    GenerateConfig config;
    config.seed = 11;
    auto examples = generate_examples(corpus, TemplateRegistry::builtin(), config);
    const auto split = split_dataset(examples, SplitRatios::parse("mini"), config.seed);
    apply_split(examples, split);
    std::vector<std::string> docs;
    for (const auto& p : corpus.pool) docs.push_back(p.text);
    distract_examples(examples, corpus, LexicalScorer(docs), config.seed);
    DatasetManifest m;
    m.seed = config.seed;
    m.config_hash = config_hash(corpus, TemplateRegistry::builtin(), config);
    m.target = split.target;
    m.achieved = split.achieved;
    write_dataset(dir, examples, m);
}

Verdict determinism() {
    Verdict v;
    testing::TempDir tmp;
    write_run(tmp / "a");
    write_run(tmp / "b");
    std::size_t files = 0, bytes = 0;
    for (const auto& entry : fs::directory_iterator(tmp / "a")) {
        const auto name = entry.path().filename();
        const auto a = testing::read_file(entry.path());
        const auto b = testing::read_file(tmp / "b" / name);
        ++files;
        bytes += a.size();
        if (a != b) v.fail(name.string() + " differs between runs");
    }
    if (files < 4) v.fail("expected train, dev, test and manifest files");
    v.detail = std::to_string(files) + " files, " + std::to_string(bytes) + " bytes, byte-identical across two runs";
    return v;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"generation-soundness", generation_soundness},
        {"strategy-ordering", strategy_ordering},
        {"evaluator-correctness", evaluator_correctness},
        {"context-constraints", context_constraints},
        {"column-classification", column_classification},
        {"table-answer-cross-oracle", table_answer_cross_oracle},
        {"operation-properties", operation_properties},
        {"stats-engine", stats_engine},
        {"determinism", determinism},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << '\n';
        for (const auto& p : v.problems) std::cout << "    " << p << '\n';
        failures += v.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
