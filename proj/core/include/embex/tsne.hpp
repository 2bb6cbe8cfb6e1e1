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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace embex::tsne {

/// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

/// Optimizer and affinity settings. Defaults follow the usual t-SNE
/// literature values.
struct Config {
    double perplexity = 30.0;
    int n_iter = 1000;
    double learning_rate = 200.0;
    double early_exaggeration = 12.0;
    int exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iter = 250;
    double theta = 0.5;   // Barnes-Hut opening angle, 0 = exact
    std::uint64_t seed = 42;
    bool pca = false;     // reserved; PCA preprocessing is not implemented

    bool operator==(const Config &) const = default;
};

/// Throws Error(invalid_argument) on out-of-range settings.
void validate(const Config &config);

struct CostSample {
    int iteration = 0;   // completed iterations
    double kl = 0.0;

    bool operator==(const CostSample &) const = default;
};

struct Layout {
    std::vector<std::string> tokens;
    Matrix coords;   // n x 2
    std::vector<CostSample> kl_history;
    Config config;
    std::string method;   // "exact" or "barnes_hut"
};

/// Hooks into a running optimization. Both callbacks run on the optimizing
/// thread; should_stop is polled once per iteration.
struct Observer {
    std::function<void(const CostSample &)> on_cost;
    std::function<bool()> should_stop;
};

struct ConditionalAffinities {
    Matrix p;                   // row i = p(j | i), zero diagonal
    std::vector<double> beta;   // 1 / (2 sigma_i^2)
};

/// Per-row Gaussian bandwidths found by bisection so that each row's
/// perplexity 2^H matches the target. Requires n >= 4 and
/// 1 <= perplexity <= n - 1.
ConditionalAffinities conditional_affinities(const Matrix &x, double perplexity);

/// Symmetrized joint affinities (P_cond + P_cond^T) / (2n).
Matrix pairwise_affinities(const Matrix &x, double perplexity);

/// Student-t joint affinities of a low-dimensional layout.
Matrix student_t_affinities(const Matrix &y);

/// Sum over off-diagonal entries of p log(p / q), q floored at 1e-12.
double kl_divergence(const Matrix &p, const Matrix &q);

/// 4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + |y_i - y_j|^2)^-1
Matrix gradient(const Matrix &p, const Matrix &y);

/// Joint affinities in compressed-row form.
struct SparseAffinities {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;

    static SparseAffinities from_dense(const Matrix &p);
};

/// Affinities restricted to each point's floor(3 * perplexity) nearest
/// input neighbors (exact kNN), then symmetrized.
SparseAffinities sparse_affinities(const Matrix &x, double perplexity);

/// Barnes-Hut gradient: exact attraction over the sparse entries, repulsion
/// approximated on a quadtree with opening criterion cell_side / dist < theta.
Matrix bh_gradient(const SparseAffinities &p, const Matrix &y, double theta);

/// KL cost of a layout under sparse P with the normalizer estimated by the
/// same quadtree approximation.
double bh_kl_divergence(const SparseAffinities &p, const Matrix &y, double theta);

/// Exact O(n^2) t-SNE. Requires rows == tokens.size(), n >= 4 and
/// perplexity < (n - 1) / 3.
Layout embed(const Matrix &x, std::vector<std::string> tokens, const Config &config,
             const Observer &observer = {});

/// Barnes-Hut t-SNE; same contract as embed.
Layout embed_bh(const Matrix &x, std::vector<std::string> tokens, const Config &config,
                const Observer &observer = {});

/// embed_bh when config.theta > 0, embed otherwise.
Layout run(const Matrix &x, std::vector<std::string> tokens, const Config &config,
           const Observer &observer = {});

} // namespace embex::tsne
