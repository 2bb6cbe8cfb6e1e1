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

#include "fixtures.hpp"

#include "embex/error.hpp"
#include "embex/simquery.hpp"

#include <doctest.h>

#include <cmath>

using namespace embex;

namespace {

EmbeddingModel orthonormal() { return EmbeddingModel({"c", "a", "b"}, {0, 0, 1, 1, 0, 0, 0, 1, 0}, 3); }

} // namespace

TEST_CASE("cosine hand values") {
    const std::vector<double> v{3, -4, 12}, neg{-3, 4, -12};
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine(v, neg) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 1}) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cosine errors") {
    CHECK_THROWS_AS(cosine(std::vector<double>{1, 0}, std::vector<double>{1}), Error);
    try {
        cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0});
        FAIL("expected zero_vector");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::zero_vector);
    }
}

TEST_CASE("orthonormal model breaks ties lexicographically") {
    const auto m = orthonormal();
    const auto r = top_k_similar(m, "a", 2);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == Neighbor{"b", 0.0});
    CHECK(r[1] == Neighbor{"c", 0.0});
    CHECK(top_k_similar(m, "a", 10).size() == 2);
}

TEST_CASE("top_k_similar matches the brute-force oracle") {
    std::mt19937_64 rng(8);
    const auto m = embex::testing::random_model(rng, 1000, 50, 5);
    for (int q = 0; q < 20; ++q) {
        const auto &tok = m.token(rng() % m.size());
        const auto want = embex::testing::knn_oracle(m, tok, 100);
        for (std::size_t k : {1, 10, 100}) {
            const auto got = top_k_similar(m, tok, k);
            REQUIRE(got.size() == k);
            for (std::size_t i = 0; i < k; ++i) {
                CHECK(got[i].token == want[i].token);
                CHECK(std::abs(got[i].score - want[i].score) <= 1e-12);
            }
        }
    }
}

TEST_CASE("zero rows are skipped and cannot be queried") {
    const EmbeddingModel m({"a", "b", "z"}, {1, 0, 1, 1, 0, 0}, 2);
    const auto r = top_k_similar(m, "a", 5);
    REQUIRE(r.size() == 1);
    CHECK(r[0].token == "b");
    try {
        top_k_similar(m, "z", 1);
        FAIL("expected zero_vector");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::zero_vector);
    }
}

TEST_CASE("case fallback follows the feature kind") {
    const EmbeddingModel wf({"anglia", "franța", "Paris"}, {1, 0, 1, 0.1f, 0, 1}, 2);
    CHECK(top_k_similar(wf, "Anglia", 1)[0].token == "franța");
    CHECK(top_k_similar(wf, "FRANȚA", 1)[0].token == "anglia");
    CHECK_THROWS_AS(top_k_similar(wf, "Anglia", 1, QueryOptions{false}), Error);

    const auto cased = wf.with_meta({0, FeatureKind::lemma_cased, 0, std::nullopt, ""});
    try {
        top_k_similar(cased, "Anglia", 1);
        FAIL("expected out_of_vocabulary");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::out_of_vocabulary);
        CHECK(e.token() == "Anglia");
    }
    CHECK(top_k_similar(cased, "Anglia", 1, QueryOptions{true})[0].token == "franța");
    // Exact match wins over folding.
    CHECK(resolve_token(wf, "Paris") == 2);
}

TEST_CASE("k must be positive") { CHECK_THROWS_AS(top_k_similar(orthonormal(), "a", 0), Error); }

TEST_CASE("analogy returns the planted answer and excludes the query words") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        auto base = embex::testing::random_model(rng, 100, 16);
        std::vector<float> m(base.matrix().begin(), base.matrix().end());
        for (std::size_t d = 0; d < 16; ++d) m[3 * 16 + d] = m[0 * 16 + d] - m[1 * 16 + d] + m[2 * 16 + d];
        const EmbeddingModel model(base.vocab(), m, 16);
        const auto r = analogy(model, model.token(0), model.token(1), model.token(2), 5);
        CHECK(r.neighbors[0].token == model.token(3));
        CHECK(r.neighbors[0].score >= 1.0 - 1e-6);
        for (const auto &nb : r.neighbors) {
            CHECK(nb.token != model.token(0));
            CHECK(nb.token != model.token(1));
            CHECK(nb.token != model.token(2));
        }
        for (double v : r.trace.residual) CHECK(std::abs(v) <= 1e-6);
    }
}

TEST_CASE("vector_trace fields are re-derivable from model rows") {
    std::mt19937_64 rng(6);
    const auto m = embex::testing::random_model(rng, 60, 8);
    const auto &a = m.token(5), &b = m.token(9), &c = m.token(11);
    const auto t = vector_trace(m, a, b, c);
    const auto ra = lookup(m, a), rb = lookup(m, b), rc = lookup(m, c);
    for (std::size_t d = 0; d < 8; ++d) {
        CHECK(t.a.vector[d] == ra[d]);
        CHECK(t.a_minus_b[d] == double(ra[d]) - double(rb[d]));
        CHECK(t.query[d] == doctest::Approx(double(ra[d]) - rb[d] + rc[d]).epsilon(1e-12));
        CHECK(t.residual[d] == doctest::Approx(t.query[d] - t.result_vector[d]).epsilon(1e-12));
    }
    CHECK(t.result.token == analogy(m, a, b, c, 1).neighbors[0].token);
    CHECK(t.cos_query_result == doctest::Approx(cosine(std::span<const double>(t.query),
                                                       std::span<const double>(t.result_vector))));
    CHECK(std::abs(t.cos_query_result - t.result.score) <= 1e-6);
}

TEST_CASE("vector_trace with a = b = c") {
    std::mt19937_64 rng(7);
    const auto m = embex::testing::random_model(rng, 20, 4);
    const auto &w = m.token(3);
    const auto t = vector_trace(m, w, w, w);
    for (std::size_t d = 0; d < 4; ++d) {
        CHECK(t.a_minus_b[d] == 0.0);
        CHECK(t.query[d] == t.c.vector[d]);
    }
}

TEST_CASE("analogy OOV names the offending token") {
    const auto m = orthonormal();
    try {
        analogy(m, "a", "nope", "c", 1);
        FAIL("expected out_of_vocabulary");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::out_of_vocabulary);
        CHECK(e.token() == "nope");
    }
}

TEST_CASE("top_n_frequent is a storage-order prefix") {
    std::mt19937_64 rng(9);
    const auto m = embex::testing::random_model(rng, 500, 3);
    CHECK(top_n_frequent(m, 1) == std::vector<std::string>{m.token(0)});
    CHECK(top_n_frequent(m, 10000) == m.vocab());
    const auto top = top_n_frequent(m, 300);
    REQUIRE(top.size() == 300);
    CHECK(std::equal(top.begin(), top.end(), m.vocab().begin()));
}
