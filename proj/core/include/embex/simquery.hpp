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

#include "embex/vstore.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace embex {

struct Neighbor {
    std::string token;
    double score = 0.0;

    bool operator==(const Neighbor &) const = default;
};

/// Ranking order of neighbor lists: descending score, then ascending token.
bool ranks_before(const Neighbor &lhs, const Neighbor &rhs) noexcept;

struct TracedWord {
    std::string token;
    std::vector<double> vector;
};

/// Intermediate values of an A - B + C query, as shown by the analogy
/// interface's vector dump.
struct AnalogyTrace {
    TracedWord a, b, c;
    std::vector<double> a_minus_b;
    std::vector<double> query;            // A - B + C
    Neighbor result;                      // top-1 answer R
    std::vector<double> result_vector;    // vec(R)
    std::vector<double> residual;         // (A - B + C) - R
    double cos_query_result = 0.0;        // cos(A - B + C; R)
};

struct AnalogyResult {
    std::vector<Neighbor> neighbors;
    AnalogyTrace trace;
};

struct QueryOptions {
    /// Retry with the lowercased token when the exact token is absent.
    /// Unset means the model's default (see default_case_fallback).
    std::optional<bool> case_fallback;
};

/// On for wordform and lemma_lower models; off for lemma_cased models so
/// capitalized lemmas (named entities) are never silently folded.
bool default_case_fallback(FeatureKind kind) noexcept;

/// Sum(x_i y_i) / (|x| |y|), clamped to [-1, 1].
/// Throws Error(length_mismatch) or Error(zero_vector).
double cosine(std::span<const double> x, std::span<const double> y);
double cosine(std::span<const float> x, std::span<const float> y);

/// Row index of `token`, applying the lowercase fallback when enabled.
std::size_t resolve_token(const EmbeddingModel &model, std::string_view token,
                          const QueryOptions &opts = {});

/// Exact full scan of the unit rows against a query direction. Zero rows and
/// the `exclude` rows are never returned.
std::vector<Neighbor> nearest_to_vector(const EmbeddingModel &model, std::span<const double> query,
                                        std::size_t k, std::span<const std::size_t> exclude = {});

std::vector<Neighbor> top_k_similar(const EmbeddingModel &model, std::string_view token,
                                    std::size_t k, const QueryOptions &opts = {});

/// k nearest tokens to vec(a) - vec(b) + vec(c), excluding a, b and c.
AnalogyResult analogy(const EmbeddingModel &model, std::string_view a, std::string_view b,
                      std::string_view c, std::size_t k, const QueryOptions &opts = {});

AnalogyTrace vector_trace(const EmbeddingModel &model, std::string_view a, std::string_view b,
                          std::string_view c, const QueryOptions &opts = {});

/// First min(n, vocab size) tokens in storage (frequency) order.
std::vector<std::string> top_n_frequent(const EmbeddingModel &model, std::size_t n);

} // namespace embex
