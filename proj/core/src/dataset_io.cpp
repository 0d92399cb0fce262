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

#include "mmqa/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mmqa/errors.hpp"
#include "mmqa/serialization.hpp"
#include "mmqa/text.hpp"

namespace mmqa {

using nlohmann::json;

std::string_view to_string(Split split) {
    switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
    }
    return "train";
}

Split split_from_string(std::string_view name) {
    if (name == "train") return Split::train;
    if (name == "dev") return Split::dev;
    if (name == "test") return Split::test;
    throw SchemaError("unknown split '" + std::string(name) + "'");
}

bool compute_multimodal(const Program& program) {
    return modalities_used(program).size() >= 2;
}

bool compute_compositional(const Program& program) {
    return !program.is_atomic();
}

void validate_example(const Example& e) {
    if (e.answers.empty()) throw ValidationError("example '" + e.qid + "' has no answers");
    if (e.multimodal != compute_multimodal(e.program)) {
        throw ValidationError("example '" + e.qid + "' has a stale multimodal flag");
    }
    if (e.compositional != compute_compositional(e.program)) {
        throw ValidationError("example '" + e.qid + "' has a stale compositional flag");
    }
}

// ---- JSON lines ------------------------------------------------------------

void write_examples(std::ostream& out, const std::vector<Example>& examples) {
    for (const auto& e : examples) out << to_json(e).dump() << '\n';
}

std::vector<Example> read_examples(std::istream& in, const std::string& source) {
    std::vector<Example> out;
    std::set<std::string> qids;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        Example e;
        try {
            e = example_from_json(json::parse(line));
        } catch (const json::parse_error& err) {
            throw SchemaError(source + ":" + std::to_string(n) + ": " + err.what());
        } catch (const SchemaError& err) {
            throw SchemaError(source + ":" + std::to_string(n) + ": " + err.what());
        }
        if (!qids.insert(e.qid).second) throw ValidationError(source + ": duplicate qid '" + e.qid + "'");
        out.push_back(std::move(e));
    }
    return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Example>& examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_examples(out, examples);
}

std::vector<Example> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_examples(in, path.string());
}

// ---- Splits ----------------------------------------------------------------

double SplitRatios::of(Split split) const {
    switch (split) {
    case Split::train: return train;
    case Split::dev: return dev;
    case Split::test: return test;
    }
    return 0;
}

SplitRatios SplitRatios::reference() {
    const double total = 23817.0 + 2441.0 + 3660.0;
    return SplitRatios{23817.0 / total, 2441.0 / total, 3660.0 / total};
}

SplitRatios SplitRatios::parse(const std::string& spec) {
    if (spec == "reference") return reference();
    if (spec == "mini") return SplitRatios{0.6, 0.2, 0.2};
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, '/')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ValidationError("bad split ratio '" + spec + "'");
        }
    }
    if (parts.size() != 3) throw ValidationError("split ratios need three parts: " + spec);
    return SplitRatios{parts[0], parts[1], parts[2]};
}

std::vector<std::string> context_keys(const Example& e) {
    std::vector<std::string> keys{"ctx:" + e.context.context_id};
    for (const auto* p : e.context.gold_paragraphs()) keys.push_back("para:" + p->id);
    for (const auto& id : e.context.gold_image_ids) keys.push_back("img:" + id);
    return keys;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

constexpr std::array<Split, 3> kSplits = {Split::train, Split::dev, Split::test};

} // namespace

SplitResult split_dataset(const std::vector<Example>& examples, const SplitRatios& ratios, std::uint64_t seed) {
    for (double r : {ratios.train, ratios.dev, ratios.test}) {
        if (r < 0) throw ValidationError("split ratios must be non-negative");
    }
    if (std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9) {
        throw ValidationError("split ratios must sum to 1");
    }

    UnionFind uf(examples.size());
    std::map<std::string, std::size_t> owner;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        for (const auto& key : context_keys(examples[i])) {
            auto [it, fresh] = owner.emplace(key, i);
            if (!fresh) uf.unite(i, it->second);
        }
    }
    // Groups keyed by their smallest member, in first-appearance order.
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (uf.find(i) == i) roots.push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(roots.begin(), roots.end(), rng);

    const std::size_t g = roots.size();
    std::array<std::size_t, 3> quota{};
    std::array<double, 3> frac{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        const double exact = ratios.of(kSplits[s]) * static_cast<double>(g);
        quota[s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        frac[s] = exact - static_cast<double>(quota[s]);
        assigned += quota[s];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; assigned < g; ++k, ++assigned) ++quota[order[k % 3]];

    SplitResult result;
    result.target = ratios;
    result.groups = quota;
    std::map<std::size_t, Split> root_split;
    std::size_t pos = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t k = 0; k < quota[s]; ++k) root_split[roots[pos++]] = kSplits[s];
    }
    result.assignment.resize(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        result.assignment[i] = root_split.at(uf.find(i));
        ++result.examples[static_cast<std::size_t>(result.assignment[i])];
    }
    if (g > 0) {
        const double dg = static_cast<double>(g);
        result.achieved = SplitRatios{quota[0] / dg, quota[1] / dg, quota[2] / dg};
    } else {
        result.achieved = SplitRatios{0, 0, 0};
    }
    for (std::size_t s = 0; s < 3; ++s) {
        if (ratios.of(kSplits[s]) > 0 && quota[s] == 0 && g > 0) {
            std::ostringstream msg;
            msg << "split ratios unachievable with " << g << " context groups; achieved " << result.achieved.train
                << "/" << result.achieved.dev << "/" << result.achieved.test;
            throw ValidationError(msg.str());
        }
    }
    return result;
}

void apply_split(std::vector<Example>& examples, const SplitResult& result) {
    if (result.assignment.size() != examples.size()) throw ValidationError("split assignment size mismatch");
    for (std::size_t i = 0; i < examples.size(); ++i) examples[i].split = result.assignment[i];
}

std::vector<Example> multimodal_boost(std::vector<Example> examples, double fraction, std::uint64_t seed) {
    if (fraction <= 0 || fraction > 1) throw ValidationError("multimodal boost fraction must be in (0, 1]");
    std::set<std::size_t> dropped;
    for (Split s : {Split::dev, Split::test}) {
        std::size_t mm = 0;
        std::vector<std::size_t> singles;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (examples[i].split != s) continue;
            if (examples[i].multimodal) {
                ++mm;
            } else {
                singles.push_back(i);
            }
        }
        const auto keep = static_cast<std::size_t>(
            std::floor(static_cast<double>(mm) * (1.0 - fraction) / fraction + 1e-9));
        if (singles.size() <= keep) continue;
        std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(s));
        std::shuffle(singles.begin(), singles.end(), rng);
        for (std::size_t k = keep; k < singles.size(); ++k) dropped.insert(singles[k]);
    }
    std::vector<Example> out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (!dropped.count(i)) out.push_back(std::move(examples[i]));
    }
    return out;
}

// ---- Dataset directories ---------------------------------------------------

namespace {

json ratios_json(const SplitRatios& r) {
    return json{{"train", r.train}, {"dev", r.dev}, {"test", r.test}};
}

SplitRatios ratios_from(const json& j) {
    return SplitRatios{j.at("train").get<double>(), j.at("dev").get<double>(), j.at("test").get<double>()};
}

} // namespace

void write_dataset(const std::filesystem::path& dir, const std::vector<Example>& examples,
                   const DatasetManifest& manifest) {
    std::filesystem::create_directories(dir);
    std::map<Split, std::vector<Example>> by_split;
    for (const auto& e : examples) {
        if (!e.split) throw ValidationError("example '" + e.qid + "' has no split");
        by_split[*e.split].push_back(e);
    }
    json counts = json::object();
    for (Split s : kSplits) {
        write_jsonl(dir / (std::string(to_string(s)) + ".jsonl"), by_split[s]);
        counts[std::string(to_string(s))] = by_split[s].size();
    }
    json m{{"counts", counts},
           {"seed", manifest.seed},
           {"config_hash", manifest.config_hash},
           {"ratios", {{"target", ratios_json(manifest.target)}, {"achieved", ratios_json(manifest.achieved)}}}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw Error("cannot write manifest in " + dir.string());
    out << m.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw Error("cannot open " + (dir / "manifest.json").string());
    try {
        const json m = json::parse(in);
        DatasetManifest out;
        for (const auto& [k, v] : m.at("counts").items()) out.counts[k] = v.get<std::size_t>();
        out.seed = m.at("seed").get<std::uint64_t>();
        out.config_hash = m.at("config_hash").get<std::string>();
        out.target = ratios_from(m.at("ratios").at("target"));
        out.achieved = ratios_from(m.at("ratios").at("achieved"));
        return out;
    } catch (const json::exception& e) {
        throw SchemaError("manifest: " + std::string(e.what()));
    }
}

std::vector<Example> read_dataset(const std::filesystem::path& path) {
    if (!std::filesystem::is_directory(path)) return read_jsonl(path);
    std::vector<Example> out;
    std::set<std::string> qids;
    for (Split s : kSplits) {
        const auto file = path / (std::string(to_string(s)) + ".jsonl");
        if (!std::filesystem::exists(file)) continue;
        for (auto& e : read_jsonl(file)) {
            if (!qids.insert(e.qid).second) throw ValidationError(path.string() + ": duplicate qid '" + e.qid + "'");
            out.push_back(std::move(e));
        }
    }
    return out;
}

// ---- Statistics ------------------------------------------------------------

CorpusStats compute_stats(const std::vector<Example>& examples) {
    if (examples.empty()) throw ValidationError("cannot compute statistics of an empty dataset");
    CorpusStats s;
    s.n_questions = examples.size();

    struct Tally {
        std::size_t n = 0, mm = 0, comp = 0;
    };
    std::map<std::string, Tally> tallies;
    std::set<std::string> qwords, awords, tables;
    double qlen = 0, n_answers = 0, answer_len = 0;
    std::size_t list_answers = 0, with_intermediate = 0, list_intermediate = 0;

    for (const auto& e : examples) {
        if (e.split) {
            for (const std::string& key : {std::string(to_string(*e.split)),
                                          std::string(*e.split == Split::train ? "" : "dev+test")}) {
                if (key.empty()) continue;
                auto& t = tallies[key];
                ++t.n;
                t.mm += e.multimodal ? 1 : 0;
                t.comp += e.compositional ? 1 : 0;
            }
        }
        const auto words = text::words(e.nl_question ? *e.nl_question : e.pl_question);
        qlen += static_cast<double>(words.size());
        qwords.insert(words.begin(), words.end());
        n_answers += static_cast<double>(e.answers.size());
        if (e.answers.size() > 1) ++list_answers;
        for (const auto& a : e.answers.values) {
            const auto aw = text::words(a);
            answer_len += static_cast<double>(aw.size());
            awords.insert(aw.begin(), aw.end());
        }
        if (e.intermediate_answers) {
            ++with_intermediate;
            if (e.intermediate_answers->size() > 1) ++list_intermediate;
        }
        tables.insert(e.context.context_id);
    }

    const double n = static_cast<double>(examples.size());
    for (const char* key : {"train", "dev", "test", "dev+test"}) {
        const Tally t = tallies[key];
        SplitStats st;
        st.n = t.n;
        if (t.n > 0) {
            st.pct_multimodal = 100.0 * static_cast<double>(t.mm) / static_cast<double>(t.n);
            st.pct_compositional = 100.0 * static_cast<double>(t.comp) / static_cast<double>(t.n);
        }
        s.by_split[key] = st;
    }
    s.avg_question_length = qlen / n;
    s.avg_answers_per_question = n_answers / n;
    s.pct_list_answers = 100.0 * static_cast<double>(list_answers) / n;
    s.pct_list_intermediate =
        with_intermediate ? 100.0 * static_cast<double>(list_intermediate) / static_cast<double>(with_intermediate) : 0.0;
    s.avg_answer_length = n_answers > 0 ? answer_len / n_answers : 0.0;
    s.distinct_question_words = qwords.size();
    s.distinct_answer_words = awords.size();
    s.distinct_tables = tables.size();
    return s;
}

json stats_to_json(const CorpusStats& s) {
    json splits = json::object();
    for (const auto& [k, v] : s.by_split) {
        splits[k] = json{{"n", v.n}, {"pct_multimodal", v.pct_multimodal}, {"pct_compositional", v.pct_compositional}};
    }
    return json{{"n_questions", s.n_questions},
                {"by_split", std::move(splits)},
                {"avg_question_length", s.avg_question_length},
                {"avg_answers_per_question", s.avg_answers_per_question},
                {"pct_list_answers", s.pct_list_answers},
                {"pct_list_intermediate", s.pct_list_intermediate},
                {"avg_answer_length", s.avg_answer_length},
                {"distinct_question_words", s.distinct_question_words},
                {"distinct_answer_words", s.distinct_answer_words},
                {"distinct_tables", s.distinct_tables}};
}

} // namespace mmqa
