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

#include <random>

#include "mmqa/evaluator.hpp"

namespace mmqa {
namespace {

std::vector<std::string> random_list(std::mt19937& rng, std::size_t n) {
    static const std::vector<std::string> words = {"red", "green", "blue", "apple", "pear", "river", "stone", "cloud"};
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> len(1, 4);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string s;
        for (int k = len(rng); k > 0; --k) s += (s.empty() ? "" : " ") + words[pick(rng)];
        out.push_back(std::move(s));
    }
    return out;
}

void BM_ListEmF1(benchmark::State& state) {
    std::mt19937 rng(7);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto gold = random_list(rng, n);
    const auto pred = random_list(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(list_em_f1(gold, pred));
}
BENCHMARK(BM_ListEmF1)->RangeMultiplier(2)->Range(1, 64);

void BM_PairF1(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(pair_f1("The Blues Brothers (1980 film)", "blues brothers"));
}
BENCHMARK(BM_PairF1);

} // namespace
} // namespace mmqa
