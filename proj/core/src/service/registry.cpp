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

#include "embex/service/registry.hpp"

#include "embex/error.hpp"
#include "embex/serialize.hpp"

#include <mutex>

namespace embex::service {

std::string_view to_string(ModelState state) noexcept {
    switch (state) {
    case ModelState::loading: return "loading";
    case ModelState::ready: return "ready";
    case ModelState::failed: return "failed";
    }
    return "failed";
}

void to_json(nlohmann::json &j, const ModelEntry &e) {
    j = nlohmann::json{{"id", e.id},
                       {"path", e.path},
                       {"state", to_string(e.state)},
                       {"meta", e.meta},
                       {"vocab_size", e.vocab_size},
                       {"zero_rows", e.zero_rows}};
    if (!e.error.empty()) j["error"] = e.error;
}

bool ModelFilter::matches(const ModelEntry &e) const {
    if (feature_kind && e.meta.feature_kind != *feature_kind) return false;
    if (dim && e.meta.dim != *dim) return false;
    if (min_frequency_threshold && e.meta.frequency_threshold < *min_frequency_threshold) return false;
    return true;
}

void ModelRegistry::reserve_id(const std::string &id, const std::string &path) {
    if (id.empty()) throw_invalid_argument("model id must not be empty");
    std::unique_lock lock(mutex_);
    if (slots_.count(id)) throw_invalid_argument("model id '" + id + "' is already registered");
    Slot slot;
    slot.entry.id = id;
    slot.entry.path = path;
    slots_.emplace(id, std::move(slot));
}

ModelEntry ModelRegistry::add(const std::string &id, std::shared_ptr<const EmbeddingModel> model,
                              std::string path) {
    if (!model) throw_invalid_argument("null model");
    model->unit_matrix();   // ready entries answer queries without further setup
    reserve_id(id, path);
    std::unique_lock lock(mutex_);
    Slot &slot = slots_.at(id);
    slot.entry.meta = model->meta();
    slot.entry.vocab_size = model->size();
    slot.entry.zero_rows = model->zero_row_count();
    slot.entry.state = ModelState::ready;
    slot.model = std::move(model);
    return slot.entry;
}

ModelEntry ModelRegistry::register_file(const std::string &id, const std::filesystem::path &path,
                                        const std::optional<std::filesystem::path> &meta_path,
                                        ModelFormat format) {
    reserve_id(id, path.string());
    std::shared_ptr<const EmbeddingModel> model;
    std::string error;
    try {
        EmbeddingModel loaded = load_model(path, format);
        if (meta_path) {
            ModelMeta meta = load_meta(*meta_path);
            if (meta.source.empty()) meta.source = path.string();
            loaded = loaded.with_meta(std::move(meta));
        }
        loaded.unit_matrix();
        model = std::make_shared<const EmbeddingModel>(std::move(loaded));
    } catch (const std::exception &e) {
        error = e.what();
    }
    std::unique_lock lock(mutex_);
    Slot &slot = slots_.at(id);
    if (model) {
        slot.entry.meta = model->meta();
        slot.entry.vocab_size = model->size();
        slot.entry.zero_rows = model->zero_row_count();
        slot.entry.state = ModelState::ready;
        slot.model = std::move(model);
    } else {
        slot.entry.state = ModelState::failed;
        slot.entry.error = error;
    }
    return slot.entry;
}

std::vector<ModelEntry> ModelRegistry::list(const ModelFilter &filter) const {
    std::shared_lock lock(mutex_);
    std::vector<ModelEntry> out;
    for (const auto &[id, slot] : slots_)
        if (filter.matches(slot.entry)) out.push_back(slot.entry);
    return out;
}

std::optional<ModelEntry> ModelRegistry::entry(const std::string &id) const {
    std::shared_lock lock(mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) return std::nullopt;
    return it->second.entry;
}

std::shared_ptr<const EmbeddingModel> ModelRegistry::get(const std::string &id) const {
    std::shared_lock lock(mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) throw Error(ErrorCode::unknown_model, "unknown model '" + id + "'");
    if (it->second.entry.state != ModelState::ready) {
        throw Error(ErrorCode::unknown_model, "model '" + id + "' is " +
                                                  std::string(to_string(it->second.entry.state)));
    }
    return it->second.model;
}

bool ModelRegistry::contains(const std::string &id) const {
    std::shared_lock lock(mutex_);
    return slots_.count(id) != 0;
}

void to_json(nlohmann::json &j, const CorpusEntry &e) {
    j = nlohmann::json{{"id", e.id},
                       {"path", e.path.string()},
                       {"format", e.format == CorpusFormat::annotated ? "annotated" : "plain"}};
}

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "annotated") return CorpusFormat::annotated;
    if (name == "plain") return CorpusFormat::plain;
    throw_invalid_argument("unknown corpus format '" + std::string(name) + "' (expected annotated or plain)");
}

void CorpusRegistry::add(CorpusEntry entry) {
    if (entry.id.empty()) throw_invalid_argument("corpus id must not be empty");
    std::unique_lock lock(mutex_);
    if (corpora_.count(entry.id)) throw_invalid_argument("corpus id '" + entry.id + "' is already registered");
    corpora_.emplace(entry.id, std::move(entry));
}

CorpusEntry CorpusRegistry::get(const std::string &id) const {
    std::shared_lock lock(mutex_);
    auto it = corpora_.find(id);
    if (it == corpora_.end()) throw Error(ErrorCode::unknown_corpus, "unknown corpus '" + id + "'");
    return it->second;
}

std::vector<CorpusEntry> CorpusRegistry::list() const {
    std::shared_lock lock(mutex_);
    std::vector<CorpusEntry> out;
    for (const auto &[id, e] : corpora_) out.push_back(e);
    return out;
}

} // namespace embex::service
