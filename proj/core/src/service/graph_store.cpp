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

#include "embex/service/graph_store.hpp"

#include "embex/error.hpp"
#include "embex/serialize.hpp"

#include <fstream>

namespace embex::service {

GraphStore::GraphStore(std::optional<std::filesystem::path> persist_dir) : dir_(std::move(persist_dir)) {
    if (!dir_) return;
    std::filesystem::create_directories(*dir_);
    for (const auto &file : std::filesystem::directory_iterator(*dir_)) {
        if (file.path().extension() != ".json") continue;
        const std::string id = file.path().stem().string();
        std::ifstream in(file.path());
        json j;
        try {
            in >> j;
        } catch (const json::exception &) {
            continue;   // partial write from an interrupted run
        }
        auto s = std::make_shared<Slot>();
        s->graph = j.get<SimilarityGraph>();
        graphs_.emplace(id, std::move(s));
        if (id.size() > 1 && id[0] == 'g') {
            try {
                next_id_ = std::max(next_id_, std::stoul(id.substr(1)) + 1);
            } catch (const std::exception &) {
            }
        }
    }
}

std::string GraphStore::create(SimilarityGraph graph) {
    auto s = std::make_shared<Slot>();
    s->graph = std::move(graph);
    std::string id;
    {
        std::unique_lock lock(mutex_);
        id = "g" + std::to_string(next_id_++);
        graphs_.emplace(id, s);
    }
    std::lock_guard writer(s->writer);
    persist(id, s->graph);
    return id;
}

std::shared_ptr<GraphStore::Slot> GraphStore::slot(const std::string &id) const {
    std::shared_lock lock(mutex_);
    auto it = graphs_.find(id);
    if (it == graphs_.end()) throw Error(ErrorCode::unknown_graph, "unknown graph '" + id + "'");
    return it->second;
}

SimilarityGraph GraphStore::snapshot(const std::string &id) const {
    const auto s = slot(id);
    std::shared_lock read(s->reader);
    return s->graph;
}

SimilarityGraph GraphStore::mutate(const std::string &id, const std::function<void(SimilarityGraph &)> &op) {
    const auto s = slot(id);
    std::lock_guard writer(s->writer);
    SimilarityGraph copy = [&] {
        std::shared_lock read(s->reader);
        return s->graph;
    }();
    op(copy);
    {
        std::unique_lock swap(s->reader);
        s->graph = copy;
    }
    persist(id, copy);
    return copy;
}

std::size_t GraphStore::size() const {
    std::shared_lock lock(mutex_);
    return graphs_.size();
}

void GraphStore::persist(const std::string &id, const SimilarityGraph &graph) const {
    if (!dir_) return;
    const auto final_path = *dir_ / (id + ".json");
    const auto tmp = *dir_ / (id + ".json.tmp");
    {
        std::ofstream out(tmp);
        if (!out) throw Error(ErrorCode::io_failure, "cannot write " + tmp.string());
        out << json(graph).dump();
    }
    std::filesystem::rename(tmp, final_path);
}

} // namespace embex::service
