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

#include "embex/tsne.hpp"

#include "embex/error.hpp"
#include "quadtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace embex::tsne {

namespace {

constexpr double kEntropyTolerance = 1e-13;
constexpr int kMaxBisection = 200;
constexpr double kMinGain = 0.01;
constexpr int kCostEvery = 50;

Matrix squared_distances(const Matrix &x) {
    Matrix d(x.rows, x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (std::size_t j = i + 1; j < x.rows; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols; ++k) {
                const double t = x(i, k) - x(j, k);
                s += t * t;
            }
            d(i, j) = s;
            d(j, i) = s;
        }
    }
    return d;
}

void check_not_degenerate(const Matrix &dist) {
    const bool any = std::any_of(dist.data.begin(), dist.data.end(), [](double v) { return v > 0.0; });
    if (!any) throw Error(ErrorCode::degenerate_input, "all input points are identical");
}

// Fills p[0..m) with the Gaussian conditional distribution over the given
// squared distances whose entropy matches log(perplexity). Returns beta.
double fit_row(std::span<const double> dist, double perplexity, std::span<double> p) {
    const double target = std::log(perplexity);
    const double dmin = *std::min_element(dist.begin(), dist.end());
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxBisection; ++it) {
        double sum = 0.0, weighted = 0.0;
        for (std::size_t j = 0; j < dist.size(); ++j) {
            const double shifted = dist[j] - dmin;
            p[j] = std::exp(-beta * shifted);
            sum += p[j];
            weighted += p[j] * shifted;
        }
        const double entropy = std::log(sum) + beta * weighted / sum;
        for (double &v : p) v /= sum;
        const double diff = entropy - target;
        if (std::abs(diff) < kEntropyTolerance) break;
        const double prev = beta;
        if (diff > 0) {
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
        } else {
            hi = beta;
            beta = 0.5 * (beta + lo);
        }
        if (beta == prev) break;
    }
    return beta;
}

void check_perplexity_range(std::size_t n, double perplexity) {
    if (n < 4) throw_invalid_argument("t-SNE needs at least 4 points, got " + std::to_string(n));
    if (!(perplexity >= 1.0)) throw_invalid_argument("perplexity must be at least 1");
    if (perplexity > static_cast<double>(n - 1)) {
        throw Error(ErrorCode::perplexity_too_large,
                    "perplexity " + std::to_string(perplexity) + " exceeds n - 1 = " +
                        std::to_string(n - 1));
    }
}

void check_embed_inputs(const Matrix &x, const std::vector<std::string> &tokens, const Config &config) {
    validate(config);
    if (x.rows != tokens.size()) {
        throw_invalid_argument("input has " + std::to_string(x.rows) + " rows but " +
                               std::to_string(tokens.size()) + " tokens");
    }
    if (x.rows < 4) throw_invalid_argument("t-SNE needs at least 4 points, got " + std::to_string(x.rows));
    const double limit = static_cast<double>(x.rows - 1) / 3.0;
    if (!(config.perplexity < limit)) {
        throw Error(ErrorCode::perplexity_too_large,
                    "perplexity " + std::to_string(config.perplexity) + " must be below (n - 1) / 3 = " +
                        std::to_string(limit));
    }
}

Matrix exact_gradient(const Matrix &p, const Matrix &y, double exaggeration) {
    const std::size_t n = y.rows, dims = y.cols;
    Matrix w(n, n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < dims; ++k) {
                const double t = y(i, k) - y(j, k);
                d2 += t * t;
            }
            const double v = 1.0 / (1.0 + d2);
            w(i, j) = v;
            w(j, i) = v;
            z += 2.0 * v;
        }
    }
    Matrix g(n, dims);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double coeff = (exaggeration * p(i, j) - w(i, j) / z) * w(i, j);
            for (std::size_t k = 0; k < dims; ++k) g(i, k) += coeff * (y(i, k) - y(j, k));
        }
        for (std::size_t k = 0; k < dims; ++k) g(i, k) *= 4.0;
    }
    return g;
}

Matrix barnes_hut_gradient(const SparseAffinities &p, const Matrix &y, double theta, double exaggeration) {
    const std::size_t n = y.rows;
    if (y.cols != 2) throw_invalid_argument("Barnes-Hut gradient requires a 2-D layout");
    detail::QuadTree tree(y);
    Matrix attr(n, 2), rep(n, 2);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            const std::size_t j = p.col[e];
            const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
            const double mult = exaggeration * p.val[e] / (1.0 + dx * dx + dy * dy);
            attr(i, 0) += mult * dx;
            attr(i, 1) += mult * dy;
        }
        const auto r = tree.repulsion(i, theta);
        z += r.z;
        rep(i, 0) = r.fx;
        rep(i, 1) = r.fy;
    }
    Matrix g(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        g(i, 0) = 4.0 * (attr(i, 0) - rep(i, 0) / z);
        g(i, 1) = 4.0 * (attr(i, 1) - rep(i, 1) / z);
    }
    return g;
}

Matrix initial_layout(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1e-4);
    Matrix y(n, 2);
    for (double &v : y.data) v = gauss(rng);
    return y;
}

template <typename GradientFn, typename CostFn>
Layout optimize(std::vector<std::string> tokens, const Config &config, const Observer &observer,
                const char *method, GradientFn &&grad, CostFn &&cost) {
    const std::size_t n = tokens.size();
    Matrix y = initial_layout(n, config.seed);
    Matrix update(n, 2), gains(n, 2, 1.0);
    Layout out;
    out.config = config;
    out.method = method;

    for (int iter = 0; iter < config.n_iter; ++iter) {
        if (observer.should_stop && observer.should_stop())
            throw Error(ErrorCode::cancelled, "t-SNE run cancelled");
        const double exaggeration = iter < config.exaggeration_iters ? config.early_exaggeration : 1.0;
        const double momentum = iter < config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
        const Matrix g = grad(y, exaggeration);
        for (std::size_t k = 0; k < y.data.size(); ++k) {
            const bool same_sign = (g.data[k] > 0.0) == (update.data[k] > 0.0);
            gains.data[k] = same_sign ? gains.data[k] * 0.8 : gains.data[k] + 0.2;
            gains.data[k] = std::max(gains.data[k], kMinGain);
            update.data[k] = momentum * update.data[k] - config.learning_rate * gains.data[k] * g.data[k];
            y.data[k] += update.data[k];
        }
        for (std::size_t c = 0; c < 2; ++c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
        }
        const int done = iter + 1;
        if (done % kCostEvery == 0 || done == config.n_iter) {
            const CostSample sample{done, cost(y)};
            out.kl_history.push_back(sample);
            if (observer.on_cost) observer.on_cost(sample);
        }
    }
    for (double v : y.data) {
        if (!std::isfinite(v)) throw Error(ErrorCode::degenerate_input, "t-SNE diverged to non-finite coordinates");
    }
    out.tokens = std::move(tokens);
    out.coords = std::move(y);
    return out;
}

} // namespace

void validate(const Config &c) {
    if (!(c.perplexity > 0.0)) throw_invalid_argument("perplexity must be positive");
    if (c.n_iter < 0) throw_invalid_argument("n_iter must be non-negative");
    if (!(c.learning_rate > 0.0)) throw_invalid_argument("learning_rate must be positive");
    if (!(c.early_exaggeration > 0.0)) throw_invalid_argument("early_exaggeration must be positive");
    if (c.exaggeration_iters < 0 || c.momentum_switch_iter < 0)
        throw_invalid_argument("schedule iterations must be non-negative");
    if (c.initial_momentum < 0.0 || c.initial_momentum >= 1.0 || c.final_momentum < 0.0 || c.final_momentum >= 1.0)
        throw_invalid_argument("momentum must lie in [0, 1)");
    if (!(c.theta >= 0.0 && c.theta <= 1.0)) throw_invalid_argument("theta must lie in [0, 1]");
    if (c.pca) throw_invalid_argument("PCA preprocessing is not supported");
}

ConditionalAffinities conditional_affinities(const Matrix &x, double perplexity) {
    const std::size_t n = x.rows;
    check_perplexity_range(n, perplexity);
    const Matrix dist = squared_distances(x);
    check_not_degenerate(dist);

    ConditionalAffinities out{Matrix(n, n), std::vector<double>(n)};
    std::vector<double> d(n - 1), p(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0, k = 0; j < n; ++j)
            if (j != i) d[k++] = dist(i, j);
        out.beta[i] = fit_row(d, perplexity, p);
        for (std::size_t j = 0, k = 0; j < n; ++j)
            if (j != i) out.p(i, j) = p[k++];
    }
    return out;
}

Matrix pairwise_affinities(const Matrix &x, double perplexity) {
    const Matrix cond = conditional_affinities(x, perplexity).p;
    const std::size_t n = x.rows;
    Matrix joint(n, n);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) joint(i, j) = (cond(i, j) + cond(j, i)) / denom;
    return joint;
}

Matrix student_t_affinities(const Matrix &y) {
    const std::size_t n = y.rows;
    Matrix q(n, n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < y.cols; ++k) {
                const double t = y(i, k) - y(j, k);
                d2 += t * t;
            }
            const double w = 1.0 / (1.0 + d2);
            q(i, j) = w;
            q(j, i) = w;
            z += 2.0 * w;
        }
    }
    for (double &v : q.data) v /= z;
    return q;
}

double kl_divergence(const Matrix &p, const Matrix &q) {
    if (p.rows != q.rows || p.cols != q.cols)
        throw Error(ErrorCode::length_mismatch, "KL divergence of differently shaped matrices");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.rows; ++i) {
        for (std::size_t j = 0; j < p.cols; ++j) {
            if (i == j) continue;
            const double pij = p(i, j);
            if (pij <= 0.0) continue;
            kl += pij * std::log(pij / std::max(q(i, j), 1e-12));
        }
    }
    return kl;
}

Matrix gradient(const Matrix &p, const Matrix &y) {
    if (p.rows != y.rows || p.cols != y.rows)
        throw Error(ErrorCode::length_mismatch, "P must be n x n for an n-point layout");
    return exact_gradient(p, y, 1.0);
}

SparseAffinities SparseAffinities::from_dense(const Matrix &p) {
    SparseAffinities s;
    s.n = p.rows;
    s.row_ptr.push_back(0);
    for (std::size_t i = 0; i < p.rows; ++i) {
        for (std::size_t j = 0; j < p.cols; ++j) {
            if (i != j && p(i, j) != 0.0) {
                s.col.push_back(j);
                s.val.push_back(p(i, j));
            }
        }
        s.row_ptr.push_back(s.col.size());
    }
    return s;
}

SparseAffinities sparse_affinities(const Matrix &x, double perplexity) {
    const std::size_t n = x.rows;
    check_perplexity_range(n, perplexity);
    const std::size_t k = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::floor(3.0 * perplexity)));
    if (static_cast<double>(k) < perplexity) {
        throw Error(ErrorCode::perplexity_too_large, "not enough neighbors for the requested perplexity");
    }

    struct Entry {
        std::size_t i, j;
        double v;
    };
    std::vector<Entry> entries;
    entries.reserve(2 * n * k);
    std::vector<double> dist(n);
    std::vector<std::size_t> order(n);
    std::vector<double> nd(k), np(k);
    bool any_distance = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < x.cols; ++c) {
                const double t = x(i, c) - x(j, c);
                s += t * t;
            }
            dist[j] = s;
            if (s > 0.0) any_distance = true;
        }
        std::iota(order.begin(), order.end(), 0);
        std::erase(order, i);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t a, std::size_t b) {
                              return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
                          });
        order.push_back(i);   // restore size for the next row
        for (std::size_t t = 0; t < k; ++t) nd[t] = dist[order[t]];
        fit_row(nd, perplexity, np);
        for (std::size_t t = 0; t < k; ++t) {
            entries.push_back({i, order[t], np[t]});
            entries.push_back({order[t], i, np[t]});
        }
    }
    if (!any_distance) throw Error(ErrorCode::degenerate_input, "all input points are identical");

    std::sort(entries.begin(), entries.end(), [](const Entry &a, const Entry &b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    SparseAffinities s;
    s.n = n;
    s.row_ptr.assign(n + 1, 0);
    const double denom = 2.0 * static_cast<double>(n);
    for (std::size_t e = 0; e < entries.size();) {
        std::size_t f = e;
        double sum = 0.0;
        while (f < entries.size() && entries[f].i == entries[e].i && entries[f].j == entries[e].j)
            sum += entries[f++].v;
        s.col.push_back(entries[e].j);
        s.val.push_back(sum / denom);
        ++s.row_ptr[entries[e].i + 1];
        e = f;
    }
    for (std::size_t i = 0; i < n; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    return s;
}

Matrix bh_gradient(const SparseAffinities &p, const Matrix &y, double theta) {
    if (p.n != y.rows) throw Error(ErrorCode::length_mismatch, "P and layout disagree on point count");
    return barnes_hut_gradient(p, y, theta, 1.0);
}

double bh_kl_divergence(const SparseAffinities &p, const Matrix &y, double theta) {
    detail::QuadTree tree(y);
    double z = 0.0;
    for (std::size_t i = 0; i < y.rows; ++i) z += tree.repulsion(i, theta).z;
    double kl = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        for (std::size_t e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
            const std::size_t j = p.col[e];
            const double pij = p.val[e];
            if (pij <= 0.0) continue;
            const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
            const double q = (1.0 / (1.0 + dx * dx + dy * dy)) / z;
            kl += pij * std::log(pij / std::max(q, 1e-12));
        }
    }
    return kl;
}

Layout embed(const Matrix &x, std::vector<std::string> tokens, const Config &config,
             const Observer &observer) {
    check_embed_inputs(x, tokens, config);
    const Matrix p = pairwise_affinities(x, config.perplexity);
    return optimize(
        std::move(tokens), config, observer, "exact",
        [&](const Matrix &y, double exaggeration) { return exact_gradient(p, y, exaggeration); },
        [&](const Matrix &y) { return kl_divergence(p, student_t_affinities(y)); });
}

Layout embed_bh(const Matrix &x, std::vector<std::string> tokens, const Config &config,
                const Observer &observer) {
    check_embed_inputs(x, tokens, config);
    const SparseAffinities p = sparse_affinities(x, config.perplexity);
    const double theta = config.theta;
    return optimize(
        std::move(tokens), config, observer, "barnes_hut",
        [&](const Matrix &y, double exaggeration) { return barnes_hut_gradient(p, y, theta, exaggeration); },
        [&](const Matrix &y) { return bh_kl_divergence(p, y, theta); });
}

Layout run(const Matrix &x, std::vector<std::string> tokens, const Config &config,
           const Observer &observer) {
    if (config.theta > 0.0) return embed_bh(x, std::move(tokens), config, observer);
    return embed(x, std::move(tokens), config, observer);
}

} // namespace embex::tsne
