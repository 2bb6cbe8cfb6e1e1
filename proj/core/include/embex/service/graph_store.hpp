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

#include "embex/graphx.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace embex::service {

/// Per-session similarity graphs. Mutations of one graph are serialized and
/// applied to a private copy that is swapped in only on success, so readers
/// never observe a half-applied operation.
class GraphStore {
public:
    /// With a directory, every graph is written to "<dir>/<id>.json" after
    /// each change and reloaded on construction.
    explicit GraphStore(std::optional<std::filesystem::path> persist_dir = std::nullopt);

    std::string create(SimilarityGraph graph);
    /// Copy of the current graph; Error(unknown_graph) when absent.
    SimilarityGraph snapshot(const std::string &id) const;
    SimilarityGraph mutate(const std::string &id, const std::function<void(SimilarityGraph &)> &op);
    std::size_t size() const;

private:
    struct Slot {
        std::mutex writer;
        mutable std::shared_mutex reader;
        SimilarityGraph graph;
    };

    std::shared_ptr<Slot> slot(const std::string &id) const;
    void persist(const std::string &id, const SimilarityGraph &graph) const;

    std::optional<std::filesystem::path> dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Slot>> graphs_;
    std::size_t next_id_ = 1;
};

} // namespace embex::service
