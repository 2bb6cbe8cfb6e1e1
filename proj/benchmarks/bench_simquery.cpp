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

#include "embex/simquery.hpp"

#include <random>

namespace {

embex::EmbeddingModel gaussian_model(std::size_t n, std::size_t dim) {
    std::mt19937_64 rng(11);
    std::normal_distribution<float> g;
    std::vector<std::string> vocab(n);
    for (std::size_t i = 0; i < n; ++i) vocab[i] = "w" + std::to_string(i);
    std::vector<float> m(n * dim);
    for (auto &v : m) v = g(rng);
    return {std::move(vocab), std::move(m), dim};
}

void BM_TopKSimilar(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = gaussian_model(n, 300);
    std::size_t q = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(embex::top_k_similar(model, model.token(q), 10));
        q = (q + 7919) % n;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_TopKSimilar)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_Analogy(benchmark::State &state) {
    const auto model = gaussian_model(50'000, 300);
    for (auto _ : state) benchmark::DoNotOptimize(embex::analogy(model, "w1", "w2", "w3", 10));
}
BENCHMARK(BM_Analogy)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
