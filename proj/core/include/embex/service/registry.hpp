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

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace embex::service {

enum class ModelState { loading, ready, failed };

std::string_view to_string(ModelState state) noexcept;

struct ModelEntry {
    std::string id;
    std::string path;
    ModelMeta meta;
    ModelState state = ModelState::loading;
    std::string error;
    std::size_t vocab_size = 0;
    std::size_t zero_rows = 0;
};

void to_json(nlohmann::json &j, const ModelEntry &e);

struct ModelFilter {
    std::optional<FeatureKind> feature_kind;
    std::optional<std::size_t> dim;
    std::optional<std::uint64_t> min_frequency_threshold;

    bool matches(const ModelEntry &e) const;
};

/// Named, immutable models shared by all request handlers.
class ModelRegistry {
public:
    /// Registers an already loaded model as ready.
    ModelEntry add(const std::string &id, std::shared_ptr<const EmbeddingModel> model, std::string path = {});

    /// Loads a model file synchronously; the entry is visible as "loading"
    /// while the load runs and ends "ready" or "failed". A meta_path
    /// overrides the default sidecar.
    ModelEntry register_file(const std::string &id, const std::filesystem::path &path,
                             const std::optional<std::filesystem::path> &meta_path = std::nullopt,
                             ModelFormat format = ModelFormat::automatic);

    std::vector<ModelEntry> list(const ModelFilter &filter = {}) const;
    std::optional<ModelEntry> entry(const std::string &id) const;

    /// Ready model or Error(unknown_model).
    std::shared_ptr<const EmbeddingModel> get(const std::string &id) const;
    bool contains(const std::string &id) const;

private:
    struct Slot {
        ModelEntry entry;
        std::shared_ptr<const EmbeddingModel> model;
    };

    void reserve_id(const std::string &id, const std::string &path);

    mutable std::shared_mutex mutex_;
    std::map<std::string, Slot> slots_;
};

enum class CorpusFormat { annotated, plain };

struct CorpusEntry {
    std::string id;
    std::filesystem::path path;
    CorpusFormat format = CorpusFormat::annotated;
};

void to_json(nlohmann::json &j, const CorpusEntry &e);
CorpusFormat parse_corpus_format(std::string_view name);

class CorpusRegistry {
public:
    void add(CorpusEntry entry);
    /// Error(unknown_corpus) when absent.
    CorpusEntry get(const std::string &id) const;
    std::vector<CorpusEntry> list() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, CorpusEntry> corpora_;
};

} // namespace embex::service
