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

#include "embex/trainer.hpp"

#include <random>

namespace {

embex::trainer::TokenStream zipf_corpus(std::size_t vocab, std::size_t tokens) {
    std::mt19937_64 rng(5);
    std::vector<double> w(vocab);
    for (std::size_t i = 0; i < vocab; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    embex::trainer::TokenStream out;
    for (std::size_t t = 0; t < tokens; t += 20) {
        auto &s = out.emplace_back();
        for (int j = 0; j < 20; ++j) s.push_back("w" + std::to_string(pick(rng)));
    }
    return out;
}

void BM_TrainEpoch(benchmark::State &state) {
    const auto corpus = zipf_corpus(5000, 100'000);
    embex::trainer::TrainConfig cfg;
    cfg.model_type = state.range(0) == 0 ? embex::trainer::ModelType::skipgram : embex::trainer::ModelType::cbow;
    cfg.dim = 100;
    cfg.epochs = 1;
    cfg.min_count = 1;
    for (auto _ : state) benchmark::DoNotOptimize(embex::trainer::train(corpus, cfg));
    state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_TrainEpoch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
