/*
 * Copyright 2026 The embex Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "embex/tsne.hpp"

#include <random>

namespace {

using embex::tsne::Matrix;

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(rows, cols);
    for (auto &v : m.data) v = g(rng);
    return m;
}

void BM_ExactGradient(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = embex::tsne::pairwise_affinities(gaussian(n, 50, 1), 30.0);
    const auto y = gaussian(n, 2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(embex::tsne::gradient(p, y));
}
BENCHMARK(BM_ExactGradient)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BarnesHutGradient(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = embex::tsne::sparse_affinities(gaussian(n, 50, 1), 30.0);
    const auto y = gaussian(n, 2, 2);
    for (auto _ : state) benchmark::DoNotOptimize(embex::tsne::bh_gradient(p, y, 0.5));
}
BENCHMARK(BM_BarnesHutGradient)->Arg(500)->Arg(1000)->Arg(2000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_SparseAffinities(benchmark::State &state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 50, 3);
    for (auto _ : state) benchmark::DoNotOptimize(embex::tsne::sparse_affinities(x, 30.0));
}
BENCHMARK(BM_SparseAffinities)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
