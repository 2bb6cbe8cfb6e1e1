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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace embex {

/// Machine-readable failure kinds. The snake_case spelling returned by
/// to_string() is the "error" discriminant used in service responses.
enum class ErrorCode {
    malformed_header,
    dimension_mismatch,
    duplicate_token,
    non_finite_value,
    truncated_file,
    io_failure,
    out_of_vocabulary,
    zero_vector,
    length_mismatch,
    perplexity_too_large,
    degenerate_input,
    node_not_in_graph,
    graph_cap_exceeded,
    malformed_record,
    empty_vocab,
    invalid_argument,
    cancelled,
    unknown_model,
    unknown_job,
    unknown_graph,
    unknown_corpus,
    bad_selection,
    malformed_json,
    job_not_done,
    job_failed,
    not_found,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Offending token for vocabulary-related failures.
    const std::optional<std::string> &token() const noexcept { return token_; }
    /// 1-based line (text) or record (binary) number for parse failures.
    const std::optional<std::size_t> &line() const noexcept { return line_; }

    Error &with_token(std::string token) {
        token_ = std::move(token);
        return *this;
    }
    Error &with_line(std::size_t line) {
        line_ = line;
        return *this;
    }

private:
    ErrorCode code_;
    std::optional<std::string> token_;
    std::optional<std::size_t> line_;
};

[[noreturn]] void throw_out_of_vocabulary(std::string_view token);
[[noreturn]] void throw_invalid_argument(const std::string &message);

} // namespace embex
