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
#include "embex/vstore.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

using namespace embex;
using embex::testing::TempDir;

namespace {

EmbeddingModel m2x3() { return EmbeddingModel({"a", "b"}, {1, 0, 0, 0, 1, 0}, 3); }

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected an embex::Error");
    return ErrorCode::not_found;
}

void write_file(const std::filesystem::path &p, const std::string &bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

std::string le_floats(std::initializer_list<float> values) {
    std::string out;
    for (float v : values) {
        char buf[4];
        std::memcpy(buf, &v, 4);
        out.append(buf, 4);
    }
    return out;
}

} // namespace

TEST_CASE("load_text reads the minimal well-formed file") {
    std::istringstream in("2 3\na 1 0 0\nb 0 1 0\n");
    const auto m = read_text(in);
    CHECK(m.vocab() == std::vector<std::string>{"a", "b"});
    CHECK(m.dim() == 3);
    CHECK(std::vector<float>(m.row(1).begin(), m.row(1).end()) == std::vector<float>{0, 1, 0});
}

TEST_CASE("load_text rejects short rows, duplicates and non-finite values") {
    std::istringstream short_row("1 3\na 1 0\n");
    CHECK(code_of([&] { read_text(short_row); }) == ErrorCode::dimension_mismatch);
    std::istringstream dup("2 1\na 1\na 2\n");
    CHECK(code_of([&] { read_text(dup); }) == ErrorCode::duplicate_token);
    std::istringstream nan("1 2\na nan 1\n");
    CHECK(code_of([&] { read_text(nan); }) == ErrorCode::non_finite_value);
    std::istringstream missing("3 1\na 1\nb 2\n");
    CHECK(code_of([&] { read_text(missing); }) == ErrorCode::truncated_file);
    std::istringstream header("x y\n");
    CHECK(code_of([&] { read_text(header); }) == ErrorCode::malformed_header);
    std::istringstream extra("1 1\na 1\nb 2\n");
    CHECK(code_of([&] { read_text(extra); }) == ErrorCode::malformed_header);
}

TEST_CASE("load_text reports the offending line") {
    std::istringstream in("2 2\na 1 2\nb 1\n");
    try {
        read_text(in);
        FAIL("expected failure");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::dimension_mismatch);
        REQUIRE(e.line());
        CHECK(*e.line() == 3);
    }
}

TEST_CASE("binary encoding of the 2x3 model equals its text counterpart") {
    TempDir dir;
    write_file(dir / "m.bin", "2 3\na " + le_floats({1, 0, 0}) + "\nb " + le_floats({0, 1, 0}) + "\n");
    write_file(dir / "m.vec", "2 3\na 1 0 0\nb 0 1 0\n");
    const auto bin = load_binary(dir / "m.bin"), txt = load_text(dir / "m.vec");
    CHECK(bin.vocab() == txt.vocab());
    CHECK(std::equal(bin.matrix().begin(), bin.matrix().end(), txt.matrix().begin()));
}

TEST_CASE("binary without record newlines and truncated binary") {
    TempDir dir;
    write_file(dir / "packed.bin", "2 2\na " + le_floats({1, 2}) + "b " + le_floats({3, 4}));
    const auto m = load_binary(dir / "packed.bin");
    CHECK(m.row(1)[1] == 4.0f);
    write_file(dir / "cut.bin", "2 2\na " + le_floats({1, 2}) + "\nb " + le_floats({3}).substr(0, 3));
    CHECK(code_of([&] { load_binary(dir / "cut.bin"); }) == ErrorCode::truncated_file);
}

TEST_CASE("lookup is exact-match") {
    const auto m = m2x3();
    const auto row = lookup(m, "a");
    CHECK(std::vector<float>(row.begin(), row.end()) == std::vector<float>{1, 0, 0});
    CHECK(code_of([&] { lookup(m, "A"); }) == ErrorCode::out_of_vocabulary);
    std::mt19937_64 rng(1);
    const auto big = embex::testing::random_model(rng, 50, 7);
    for (std::size_t i = 0; i < big.size(); ++i) CHECK(lookup(big, big.token(i)).data() == big.row(i).data());
}

TEST_CASE("model_info and sidecar metadata") {
    const auto info = model_info(m2x3());
    CHECK(info.meta.dim == 3);
    CHECK(info.vocab_size == 2);

    TempDir dir;
    ModelMeta meta{0, FeatureKind::lemma_lower, 20, 5, "corola"};
    const auto m = m2x3().with_meta(meta);
    save_text(m, dir / "m.vec");
    CHECK(std::filesystem::exists(sidecar_path(dir / "m.vec")));
    const auto back = load_text(dir / "m.vec");
    CHECK(back.meta().feature_kind == FeatureKind::lemma_lower);
    CHECK(back.meta().frequency_threshold == 20);
    CHECK(back.meta().window == 5);
    CHECK(back.meta().dim == 3);

    std::filesystem::remove(sidecar_path(dir / "m.vec"));
    const auto bare = load_text(dir / "m.vec");
    CHECK(bare.meta().feature_kind == FeatureKind::wordform);
    CHECK(!bare.meta().window);
}

TEST_CASE("header 1000 300 reports dim 300") {
    std::ostringstream os;
    os << "1000 300\n";
    for (int i = 0; i < 1000; ++i) {
        os << "w" << i;
        for (int d = 0; d < 300; ++d) os << ' ' << (d == i % 300 ? 1 : 0);
        os << '\n';
    }
    std::istringstream in(os.str());
    CHECK(model_info(read_text(in)).meta.dim == 300);
}

TEST_CASE("unit rows have norm 1 and zero rows stay zero") {
    std::mt19937_64 rng(2);
    auto base = embex::testing::random_model(rng, 40, 9);
    std::vector<float> m(base.matrix().begin(), base.matrix().end());
    std::fill_n(m.begin() + 9 * 3, 9, 0.0f);
    const EmbeddingModel model(base.vocab(), m, 9);
    CHECK(model.zero_row_count() == 1);
    for (std::size_t i = 0; i < model.size(); ++i) {
        double s = 0;
        for (float v : model.unit_row(i)) s += double(v) * v;
        if (i == 3) {
            CHECK(model.is_zero_row(i));
            CHECK(s == 0.0);
        } else {
            CHECK(std::abs(std::sqrt(s) - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("constructor validation") {
    CHECK(code_of([] { EmbeddingModel({"a"}, {1, 2, 3}, 2); }) == ErrorCode::dimension_mismatch);
    CHECK(code_of([] { EmbeddingModel({"a", "a"}, {1, 2}, 1); }) == ErrorCode::duplicate_token);
    CHECK(code_of([] { EmbeddingModel({"a"}, {INFINITY}, 1); }) == ErrorCode::non_finite_value);
    CHECK(code_of([] { parse_feature_kind("lemma"); }) == ErrorCode::invalid_argument);
}

TEST_CASE("missing file is an I/O failure") {
    CHECK(code_of([] { load_model("/nonexistent/model.vec"); }) == ErrorCode::io_failure);
}
