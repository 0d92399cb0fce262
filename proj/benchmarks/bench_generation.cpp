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


#include <benchmark/benchmark.h>

#include "mmqa/pipeline.hpp"

namespace mmqa {
namespace {

const Corpus& corpus() {
    static const Corpus c = load_corpus(MMQA_BENCH_MINI_CORPUS);
    return c;
}

void BM_GenerateMini(benchmark::State& state) {
    GenerateConfig config;
    config.seed = 7;
    std::size_t n = 0;
    for (auto _ : state) {
        auto examples = generate_examples(corpus(), TemplateRegistry::builtin(), config);
        n = examples.size();
        benchmark::DoNotOptimize(examples);
    }
    state.counters["examples"] = static_cast<double>(n);
}
BENCHMARK(BM_GenerateMini)->Unit(benchmark::kMillisecond);

void BM_BuildMini(benchmark::State& state) {
    GenerateConfig config;
    config.seed = 7;
    std::vector<std::string> docs;
    for (const auto& p : corpus().pool) docs.push_back(p.text);
    const LexicalScorer scorer(docs);
    for (auto _ : state) {
        auto examples = generate_examples(corpus(), TemplateRegistry::builtin(), config);
        apply_split(examples, split_dataset(examples, SplitRatios::parse("mini"), 7));
        distract_examples(examples, corpus(), scorer, 7);
        benchmark::DoNotOptimize(examples);
    }
}
BENCHMARK(BM_BuildMini)->Unit(benchmark::kMillisecond);

void BM_AtomicBank(benchmark::State& state) {
    GenerateConfig config;
    const Context& c = corpus().contexts.front();
    for (auto _ : state) benchmark::DoNotOptimize(build_atomic_bank(corpus(), c, config));
}
BENCHMARK(BM_AtomicBank)->Unit(benchmark::kMicrosecond);

} // namespace
} // namespace mmqa

BENCHMARK_MAIN();
