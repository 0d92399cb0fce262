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

#include <chrono>
#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmqa/annotation_server.hpp"
#include "mmqa/annotation_service.hpp"
#include "mmqa/corpus.hpp"
#include "mmqa/dataset_io.hpp"
#include "mmqa/errors.hpp"
#include "mmqa/evaluator.hpp"
#include "mmqa/executor.hpp"
#include "mmqa/pipeline.hpp"
#include "mmqa/serialization.hpp"
#include "mmqa/templates.hpp"
#include "mmqa/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string file_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mmqa::Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::to_string(mmqa::text::fnv1a(ss.str()));
}

std::string dataset_digest(const fs::path& path) {
    if (!fs::is_directory(path)) return file_digest(path);
    std::string acc;
    for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl"}) acc += file_digest(path / name);
    return acc;
}

mmqa::TemplateRegistry load_registry(const std::string& path) {
    return path.empty() ? mmqa::TemplateRegistry::builtin() : mmqa::TemplateRegistry::load(path);
}

std::unique_ptr<mmqa::RetrievalScorer> make_scorer(const std::string& spec, const mmqa::Corpus& corpus) {
    std::vector<std::string> docs;
    for (const auto& p : corpus.pool) docs.push_back(p.text);
    auto lexical = std::make_shared<mmqa::LexicalScorer>(docs);
    if (spec == "lexical") return std::make_unique<mmqa::LexicalScorer>(docs);
    if (spec.rfind("http://", 0) == 0) {
        return std::make_unique<mmqa::HttpScorer>(spec, std::chrono::milliseconds(5000), lexical);
    }
    throw mmqa::Error("unknown scorer '" + spec + "' (expected lexical or an http:// endpoint)");
}

struct GenerateArgs {
    std::string corpus;
    std::string templates;
    std::uint64_t seed = 0;
    std::size_t max_per_template = 5;
    std::size_t max_lookup = 50;
    bool no_filter = false;
};

mmqa::GenerateConfig generate_config(const GenerateArgs& a) {
    mmqa::GenerateConfig c;
    c.seed = a.seed;
    c.max_per_template = a.max_per_template;
    c.table.max_lookup_questions = a.max_lookup;
    c.apply_filter = !a.no_filter;
    return c;
}

std::vector<mmqa::Example> run_generate(const GenerateArgs& a, std::string* hash) {
    const auto corpus = mmqa::load_corpus(a.corpus);
    const auto registry = load_registry(a.templates);
    const auto config = generate_config(a);
    mmqa::GenerateReport report;
    auto examples = mmqa::generate_examples(corpus, registry, config, &report);
    for (const auto& s : report.skipped_contexts) std::cerr << "skipped context " << s.id << ": " << s.reason << '\n';
    std::cerr << "generated " << examples.size() << " examples from " << corpus.contexts.size() << " contexts ("
              << report.atomic_questions << " atomic questions, " << report.skipped_questions.size()
              << " skipped)\n";
    if (hash) *hash = mmqa::config_hash(corpus, registry, config);
    return examples;
}

mmqa::SplitResult run_split(std::vector<mmqa::Example>& examples, const std::string& ratios, std::uint64_t seed) {
    const auto result = mmqa::split_dataset(examples, mmqa::SplitRatios::parse(ratios), seed);
    mmqa::apply_split(examples, result);
    std::cerr << "split " << result.examples[0] << "/" << result.examples[1] << "/" << result.examples[2]
              << " examples over " << result.groups[0] << "/" << result.groups[1] << "/" << result.groups[2]
              << " context groups\n";
    return result;
}

void add_generate_options(CLI::App* cmd, GenerateArgs& a) {
    cmd->add_option("--corpus", a.corpus, "Corpus directory or manifest.json")->required();
    cmd->add_option("--templates", a.templates, "Template registry JSON (default: built in)");
    cmd->add_option("--seed", a.seed, "Random seed");
    cmd->add_option("--max-per-template", a.max_per_template, "Questions kept per template and context");
    cmd->add_option("--max-lookup", a.max_lookup, "Lookup questions generated per table");
    cmd->add_flag("--no-filter", a.no_filter, "Keep tables outside the size and image filter");
}

void print_stats(const mmqa::CorpusStats& s, bool with_reference) {
    std::cout << stats_to_json(s).dump(2) << '\n';
    if (!with_reference) return;
    const mmqa::ReferenceStats r;
    json ref{{"n_questions", r.n_questions},
             {"train_multimodal", r.train_multimodal},
             {"train_compositional", r.train_compositional},
             {"devtest_multimodal", r.devtest_multimodal},
             {"devtest_compositional", r.devtest_compositional},
             {"avg_question_length", r.avg_question_length},
             {"avg_answers_per_question", r.avg_answers_per_question},
             {"pct_list_answers", r.pct_list_answers},
             {"pct_list_intermediate", r.pct_list_intermediate},
             {"avg_answer_length", r.avg_answer_length},
             {"distinct_question_words", r.distinct_question_words},
             {"distinct_answer_words", r.distinct_answer_words},
             {"distinct_tables", r.distinct_tables}};
    std::cout << "reference (published full-scale values, for comparison only):\n" << ref.dump(2) << '\n';
}

mmqa::AnnotationServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal multi-hop question generation and evaluation toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    std::string out;
    auto* generate = app.add_subcommand("generate", "Generate examples with gold evidence only");
    add_generate_options(generate, gen);
    generate->add_option("--out", out, "Output JSON lines file")->required();

    std::string in;
    std::string ratios = "reference";
    std::uint64_t split_seed = 0;
    double boost = 0;
    auto* split = app.add_subcommand("split", "Assign context-disjoint train/dev/test splits");
    split->add_option("--in", in, "Examples (.jsonl or dataset directory)")->required();
    split->add_option("--ratios", ratios, "reference, mini or train/dev/test");
    split->add_option("--seed", split_seed, "Random seed");
    split->add_option("--multimodal-boost", boost, "Minimum multimodal share of dev and test");
    split->add_option("--out", out, "Output dataset directory")->required();

    std::string corpus_path;
    std::string scorer_spec = "lexical";
    std::uint64_t distract_seed = 0;
    auto* distract = app.add_subcommand("distract", "Add distractor paragraphs and images");
    distract->add_option("--in", in, "Split dataset directory")->required();
    distract->add_option("--corpus", corpus_path, "Corpus directory or manifest.json")->required();
    distract->add_option("--scorer", scorer_spec, "lexical or an http:// scoring endpoint");
    distract->add_option("--seed", distract_seed, "Random seed");
    distract->add_option("--out", out, "Output dataset directory")->required();

    auto* build = app.add_subcommand("build", "generate, split and distract in one step");
    add_generate_options(build, gen);
    build->add_option("--ratios", ratios, "reference, mini or train/dev/test");
    build->add_option("--multimodal-boost", boost, "Minimum multimodal share of dev and test");
    build->add_option("--scorer", scorer_spec, "lexical or an http:// scoring endpoint");
    build->add_option("--out", out, "Output dataset directory")->required();

    bool reference = false;
    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("--in", in, "Dataset (.jsonl or directory)")->required();
    stats->add_flag("--reference", reference, "Also print the published reference statistics");

    std::string strategy = "implicitdecomp";
    std::string answerers = "oracle";
    bool use_pl = false;
    auto* exec = app.add_subcommand("exec", "Answer every example with a strategy");
    exec->add_option("--dataset,--in", in, "Dataset (.jsonl or directory)")->required();
    exec->add_option("--strategy", strategy, "autorouting or implicitdecomp");
    exec->add_option("--answerers", answerers, "oracle, table-deterministic or external:<url>");
    exec->add_flag("--use-pl", use_pl, "Ask the pseudo-language question even when a paraphrase exists");
    exec->add_option("--out", out, "Predictions JSON lines file")->required();

    std::string pred;
    bool as_json = false;
    auto* eval = app.add_subcommand("eval", "Score predictions against gold answers");
    eval->add_option("--dataset,--gold", in, "Dataset (.jsonl or directory)")->required();
    eval->add_option("--predictions,--pred", pred, "Predictions JSON lines file")->required();
    std::string report_path;
    eval->add_option("--report", report_path, "Also write the JSON report to this file");
    eval->add_flag("--json", as_json, "Print the report as JSON");

    auto* audit = app.add_subcommand("audit", "Flag weak distractors and redundant evidence");
    audit->add_option("--in", in, "Dataset (.jsonl or directory)")->required();

    std::string config_path;
    mmqa::ServerConfig server_config;
    auto* serve = app.add_subcommand("serve", "Run the annotation HTTP service");
    serve->add_option("--config", config_path, "Server config JSON");
    serve->add_option("--dataset", server_config.dataset, "Dataset to annotate");
    serve->add_option("--store", server_config.store, "Event store directory");
    serve->add_option("--host", server_config.host, "Bind address");
    serve->add_option("--port", server_config.port, "Port, 0 for any free port");

    std::string qid;
    auto* inspect = app.add_subcommand("inspect", "Print one example");
    inspect->add_option("--in", in, "Dataset (.jsonl or directory)")->required();
    inspect->add_option("--qid", qid, "Question id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            auto examples = run_generate(gen, nullptr);
            mmqa::write_jsonl(out, examples);
        } else if (split->parsed()) {
            auto examples = mmqa::read_dataset(in);
            const auto result = run_split(examples, ratios, split_seed);
            if (boost > 0) examples = mmqa::multimodal_boost(std::move(examples), boost, split_seed);
            mmqa::DatasetManifest m;
            m.seed = split_seed;
            m.config_hash = mmqa::text::hex_digest(mmqa::text::fnv1a(dataset_digest(in) + "|" + ratios + "|" + std::to_string(boost)));
            m.target = result.target;
            m.achieved = result.achieved;
            mmqa::write_dataset(out, examples, m);
        } else if (distract->parsed()) {
            auto examples = mmqa::read_dataset(in);
            auto manifest = mmqa::read_manifest(in);
            const auto corpus = mmqa::load_corpus(corpus_path);
            const auto scorer = make_scorer(scorer_spec, corpus);
            mmqa::distract_examples(examples, corpus, *scorer, distract_seed);
            manifest.config_hash = mmqa::text::hex_digest(mmqa::text::fnv1a(manifest.config_hash + "|" + scorer_spec + "|" +
                                                         std::to_string(distract_seed)));
            mmqa::write_dataset(out, examples, manifest);
        } else if (build->parsed()) {
            std::string hash;
            auto examples = run_generate(gen, &hash);
            const auto result = run_split(examples, ratios, gen.seed);
            if (boost > 0) examples = mmqa::multimodal_boost(std::move(examples), boost, gen.seed);
            const auto corpus = mmqa::load_corpus(gen.corpus);
            const auto scorer = make_scorer(scorer_spec, corpus);
            mmqa::distract_examples(examples, corpus, *scorer, gen.seed);
            mmqa::DatasetManifest m;
            m.seed = gen.seed;
            m.config_hash = mmqa::text::hex_digest(mmqa::text::fnv1a(hash + "|" + ratios + "|" + scorer_spec + "|" + std::to_string(boost)));
            m.target = result.target;
            m.achieved = result.achieved;
            mmqa::write_dataset(out, examples, m);
        } else if (stats->parsed()) {
            print_stats(mmqa::compute_stats(mmqa::read_dataset(in)), reference);
        } else if (exec->parsed()) {
            const auto examples = mmqa::read_dataset(in);
            const auto set = mmqa::make_answerers(answerers);
            const mmqa::GoldTypePredictor predictor;
            const mmqa::StrategyContext ctx{set, predictor};
            mmqa::write_predictions(
                out, mmqa::predict_dataset(examples, mmqa::strategy_from_string(strategy), ctx, !use_pl));
        } else if (eval->parsed()) {
            const auto report = mmqa::evaluate(mmqa::read_dataset(in), mmqa::read_predictions(pred));
            const json j = mmqa::report_to_json(report);
            if (!report_path.empty()) {
                std::ofstream f(report_path, std::ios::binary);
                if (!f) throw mmqa::Error("cannot write " + report_path);
                f << j.dump(2) << '\n';
            }
            std::cout << (as_json ? j.dump(2) + "\n" : mmqa::format_report(report));
        } else if (audit->parsed()) {
            const auto flags = mmqa::audit_dataset(mmqa::read_dataset(in));
            for (const auto& f : flags) {
                std::cout << json{{"qid", f.qid}, {"kind", mmqa::to_string(f.kind)}, {"evidence", f.evidence}}.dump()
                          << '\n';
            }
            std::cerr << flags.size() << " flagged\n";
        } else if (serve->parsed()) {
            mmqa::ServerConfig cfg = config_path.empty() ? server_config : mmqa::ServerConfig::load(config_path);
            if (cfg.dataset.empty() || cfg.store.empty()) throw mmqa::Error("serve needs --dataset and --store");
            mmqa::AnnotationService service(mmqa::read_dataset(cfg.dataset), cfg.store);
            mmqa::AnnotationServer server(service, cfg);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "serving " << service.tasks().size() << " tasks on " << cfg.host << ":" << cfg.port << '\n';
            server.run();
            g_server = nullptr;
        } else if (inspect->parsed()) {
            for (const auto& e : mmqa::read_dataset(in)) {
                if (e.qid == qid) {
                    std::cout << mmqa::to_json(e).dump(2) << '\n';
                    return 0;
                }
            }
            std::cerr << "no example '" << qid << "'\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
