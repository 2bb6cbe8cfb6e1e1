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

#include "embex/error.hpp"

namespace embex {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::malformed_header: return "malformed_header";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::duplicate_token: return "duplicate_token";
    case ErrorCode::non_finite_value: return "non_finite_value";
    case ErrorCode::truncated_file: return "truncated_file";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::out_of_vocabulary: return "out_of_vocabulary";
    case ErrorCode::zero_vector: return "zero_vector";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::perplexity_too_large: return "perplexity_too_large";
    case ErrorCode::degenerate_input: return "degenerate_input";
    case ErrorCode::node_not_in_graph: return "node_not_in_graph";
    case ErrorCode::graph_cap_exceeded: return "graph_cap_exceeded";
    case ErrorCode::malformed_record: return "malformed_record";
    case ErrorCode::empty_vocab: return "empty_vocab";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::cancelled: return "cancelled";
    case ErrorCode::unknown_model: return "unknown_model";
    case ErrorCode::unknown_job: return "unknown_job";
    case ErrorCode::unknown_graph: return "unknown_graph";
    case ErrorCode::unknown_corpus: return "unknown_corpus";
    case ErrorCode::bad_selection: return "bad_selection";
    case ErrorCode::malformed_json: return "malformed_json";
    case ErrorCode::job_not_done: return "job_not_done";
    case ErrorCode::job_failed: return "job_failed";
    case ErrorCode::not_found: return "not_found";
    }
    return "unknown";
}

void throw_out_of_vocabulary(std::string_view token) {
    throw Error(ErrorCode::out_of_vocabulary,
                "out of vocabulary: '" + std::string(token) + "'")
        .with_token(std::string(token));
}

void throw_invalid_argument(const std::string &message) {
    throw Error(ErrorCode::invalid_argument, message);
}

} // namespace embex
