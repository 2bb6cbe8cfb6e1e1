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

#include "embex/text.hpp"

#include <doctest.h>

#include <cstdlib>

using embex::text::format_fixed;
using embex::text::format_shortest;
using embex::text::to_lower;

TEST_CASE("to_lower folds ASCII and Romanian diacritics") {
    CHECK(to_lower("Anglia") == "anglia");
    CHECK(to_lower("ȘCOALĂ") == "școală");
    CHECK(to_lower("ŢARĂ ÎNALTĂ Â") == "ţară înaltă â");
    CHECK(to_lower("ΑΘΗΝΑ") == "αθηνα");
    CHECK(to_lower("already lower 123") == "already lower 123");
    CHECK(to_lower("") == "");
}

TEST_CASE("to_lower passes invalid UTF-8 through") {
    const std::string bad = "A\xC3(B\xFF";
    CHECK(to_lower(bad) == "a\xC3(b\xFF");
}

TEST_CASE("format_shortest round-trips") {
    for (float v : {0.1f, 1.0f / 3.0f, -2.5e-30f, 3.4e38f, 0.0f}) {
        const auto s = format_shortest(v);
        CHECK(std::strtof(s.c_str(), nullptr) == v);
    }
    for (double v : {0.1, 1.0 / 3.0, 1e-300}) {
        const auto s = format_shortest(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_shortest(1.0f) == "1");
}

TEST_CASE("format_fixed uses the requested decimals") {
    CHECK(format_fixed(0.8007421, 6) == "0.800742");
    CHECK(format_fixed(-1.0, 3) == "-1.000");
}
