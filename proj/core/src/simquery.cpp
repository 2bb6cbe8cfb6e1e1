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

#include "embex/simquery.hpp"

#include "embex/error.hpp"
#include "embex/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace embex {

namespace {

template <typename T> double cosine_impl(std::span<const T> x, std::span<const T> y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::length_mismatch, "cosine of vectors with lengths " +
                                                    std::to_string(x.size()) + " and " +
                                                    std::to_string(y.size()));
    }
    double dot = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = x[i], b = y[i];
        dot += a * b;
        xx += a * a;
        yy += b * b;
    }
    if (xx == 0.0 || yy == 0.0) throw Error(ErrorCode::zero_vector, "cosine of a zero vector");
    return std::clamp(dot / (std::sqrt(xx) * std::sqrt(yy)), -1.0, 1.0);
}

// Four independent accumulators; the row loop is the hot path of every query.
double dot_unit(const float *row, const double *q, std::size_t dim) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t d = 0;
    for (; d + 4 <= dim; d += 4) {
        s0 += row[d] * q[d];
        s1 += row[d + 1] * q[d + 1];
        s2 += row[d + 2] * q[d + 2];
        s3 += row[d + 3] * q[d + 3];
    }
    for (; d < dim; ++d) s0 += row[d] * q[d];
    return (s0 + s1) + (s2 + s3);
}

std::vector<double> to_double(std::span<const float> v) { return {v.begin(), v.end()}; }

} // namespace

bool ranks_before(const Neighbor &lhs, const Neighbor &rhs) noexcept {
    if (lhs.score != rhs.score) return lhs.score > rhs.score;
    return lhs.token < rhs.token;
}

bool default_case_fallback(FeatureKind kind) noexcept { return kind != FeatureKind::lemma_cased; }

double cosine(std::span<const double> x, std::span<const double> y) { return cosine_impl(x, y); }
double cosine(std::span<const float> x, std::span<const float> y) { return cosine_impl(x, y); }

std::size_t resolve_token(const EmbeddingModel &model, std::string_view token,
                          const QueryOptions &opts) {
    if (auto idx = model.index_of(token)) return *idx;
    const bool fallback = opts.case_fallback.value_or(default_case_fallback(model.meta().feature_kind));
    if (fallback) {
        if (auto idx = model.index_of(text::to_lower(token))) return *idx;
    }
    throw_out_of_vocabulary(token);
}

namespace {

// Ranks every candidate row by its dot product with an already unit-length
// query direction.
std::vector<Neighbor> scan(const EmbeddingModel &model, const double *unit_q, std::size_t k,
                           std::span<const std::size_t> exclude) {
    const auto &unit = model.unit_matrix();
    const std::size_t n = model.size(), dim = model.dim();
    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i)
        scores[i] = std::clamp(dot_unit(unit.data() + i * dim, unit_q, dim), -1.0, 1.0);

    std::vector<bool> skip(n, false);
    for (std::size_t i : exclude)
        if (i < n) skip[i] = true;
    std::vector<std::uint32_t> cand;
    cand.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!skip[i] && !model.is_zero_row(i)) cand.push_back(static_cast<std::uint32_t>(i));

    const auto &vocab = model.vocab();
    auto before = [&](std::uint32_t l, std::uint32_t r) {
        if (scores[l] != scores[r]) return scores[l] > scores[r];
        return vocab[l] < vocab[r];
    };
    const std::size_t take = std::min(k, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(), before);

    std::vector<Neighbor> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({vocab[cand[i]], scores[cand[i]]});
    return out;
}

} // namespace

std::vector<Neighbor> nearest_to_vector(const EmbeddingModel &model, std::span<const double> query,
                                        std::size_t k, std::span<const std::size_t> exclude) {
    if (k == 0) throw_invalid_argument("k must be at least 1");
    if (query.size() != model.dim()) {
        throw Error(ErrorCode::length_mismatch, "query has " + std::to_string(query.size()) +
                                                    " components, model dim is " +
                                                    std::to_string(model.dim()));
    }
    double qn = 0.0;
    for (double v : query) qn += v * v;
    qn = std::sqrt(qn);
    if (qn == 0.0) throw Error(ErrorCode::zero_vector, "query vector is zero");
    std::vector<double> unit_q(query.begin(), query.end());
    for (double &v : unit_q) v /= qn;
    return scan(model, unit_q.data(), k, exclude);
}

std::vector<Neighbor> top_k_similar(const EmbeddingModel &model, std::string_view token,
                                    std::size_t k, const QueryOptions &opts) {
    if (k == 0) throw_invalid_argument("k must be at least 1");
    const std::size_t idx = resolve_token(model, token, opts);
    if (model.is_zero_row(idx)) {
        throw Error(ErrorCode::zero_vector, "token '" + model.token(idx) + "' has a zero vector")
            .with_token(model.token(idx));
    }
    const auto q = to_double(model.unit_row(idx));
    const std::size_t self[] = {idx};
    return scan(model, q.data(), k, self);
}

namespace {

struct Resolved {
    std::size_t a, b, c;
};

Resolved resolve_three(const EmbeddingModel &model, std::string_view a, std::string_view b,
                       std::string_view c, const QueryOptions &opts) {
    return {resolve_token(model, a, opts), resolve_token(model, b, opts),
            resolve_token(model, c, opts)};
}

AnalogyTrace make_trace(const EmbeddingModel &model, const Resolved &r, const Neighbor &top) {
    AnalogyTrace t;
    t.a = {model.token(r.a), to_double(model.row(r.a))};
    t.b = {model.token(r.b), to_double(model.row(r.b))};
    t.c = {model.token(r.c), to_double(model.row(r.c))};
    const std::size_t dim = model.dim();
    t.a_minus_b.resize(dim);
    t.query.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        t.a_minus_b[d] = t.a.vector[d] - t.b.vector[d];
        t.query[d] = t.a_minus_b[d] + t.c.vector[d];
    }
    t.result = top;
    t.result_vector = to_double(lookup(model, top.token));
    t.residual.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) t.residual[d] = t.query[d] - t.result_vector[d];
    t.cos_query_result = cosine(std::span<const double>(t.query), std::span<const double>(t.result_vector));
    return t;
}

std::vector<double> analogy_query(const EmbeddingModel &model, const Resolved &r) {
    const auto a = model.row(r.a), b = model.row(r.b), c = model.row(r.c);
    std::vector<double> q(model.dim());
    for (std::size_t d = 0; d < q.size(); ++d)
        q[d] = (static_cast<double>(a[d]) - static_cast<double>(b[d])) + static_cast<double>(c[d]);
    return q;
}

} // namespace

AnalogyResult analogy(const EmbeddingModel &model, std::string_view a, std::string_view b,
                      std::string_view c, std::size_t k, const QueryOptions &opts) {
    if (k == 0) throw_invalid_argument("k must be at least 1");
    const Resolved r = resolve_three(model, a, b, c, opts);
    const auto q = analogy_query(model, r);
    const std::size_t exclude[] = {r.a, r.b, r.c};
    AnalogyResult out;
    out.neighbors = nearest_to_vector(model, q, k, exclude);
    if (out.neighbors.empty()) throw_invalid_argument("no candidate tokens outside the query words");
    out.trace = make_trace(model, r, out.neighbors.front());
    return out;
}

AnalogyTrace vector_trace(const EmbeddingModel &model, std::string_view a, std::string_view b,
                          std::string_view c, const QueryOptions &opts) {
    return analogy(model, a, b, c, 1, opts).trace;
}

std::vector<std::string> top_n_frequent(const EmbeddingModel &model, std::size_t n) {
    const std::size_t take = std::min(n, model.size());
    return {model.vocab().begin(), model.vocab().begin() + static_cast<std::ptrdiff_t>(take)};
}

} // namespace embex
