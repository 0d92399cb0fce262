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

#include "mmqa/composer.hpp"
#include "mmqa/executor.hpp"

namespace mmqa {
namespace {

Table synthetic(std::size_t rows) {
    Table t;
    t.page_title = "P";
    t.table_title = "T";
    t.columns = {{"Name", SemanticType::text, 0}, {"Group", SemanticType::text, 1}, {"Score", SemanticType::numeric, 2}};
    for (std::size_t r = 0; r < rows; ++r) {
        t.rows.push_back({Cell{"N" + std::to_string(r), {"N" + std::to_string(r)}, {}},
                          Cell{"G" + std::to_string(r % 7), {}, {}}, Cell{std::to_string((r * 37) % 101), {}, {}}});
    }
    return t;
}

void BM_TableAnswerLookup(benchmark::State& state) {
    const Table t = synthetic(static_cast<std::size_t>(state.range(0)));
    const TablePredicate p{0, 1, std::string("G3"), std::nullopt};
    for (auto _ : state) benchmark::DoNotOptimize(table_answer(t, p));
}
BENCHMARK(BM_TableAnswerLookup)->RangeMultiplier(4)->Range(16, 4096);

void BM_TableAnswerSuperlative(benchmark::State& state) {
    const Table t = synthetic(static_cast<std::size_t>(state.range(0)));
    const TablePredicate p{0, 1, std::string("G3"), Extremum::max};
    for (auto _ : state) benchmark::DoNotOptimize(table_answer(t, p));
}
BENCHMARK(BM_TableAnswerSuperlative)->RangeMultiplier(4)->Range(16, 4096);

void BM_ClassifyColumn(benchmark::State& state) {
    std::vector<std::string> cells;
    for (int i = 0; i < state.range(0); ++i) {
        cells.push_back("March " + std::to_string(1 + i % 28) + ", 19" + std::to_string(50 + i % 50));
    }
    for (auto _ : state) benchmark::DoNotOptimize(classify_column(cells));
}
BENCHMARK(BM_ClassifyColumn)->RangeMultiplier(4)->Range(16, 1024);

} // namespace
} // namespace mmqa
