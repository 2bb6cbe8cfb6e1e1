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

#include <string>
#include <string_view>

namespace embex::text {

/// Full Unicode lowercasing of a UTF-8 string. Invalid byte sequences are
/// copied through unchanged.
std::string to_lower(std::string_view utf8);

/// Shortest decimal representation that parses back to the same value.
std::string format_shortest(float value);
std::string format_shortest(double value);

/// Fixed-point formatting with the given number of decimals ("0.800742").
std::string format_fixed(double value, int decimals);

} // namespace embex::text
