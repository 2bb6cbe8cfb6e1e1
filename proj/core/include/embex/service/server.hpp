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

#include "embex/service/graph_store.hpp"
#include "embex/service/jobs.hpp"
#include "embex/service/registry.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace embex::service {

struct ServiceConfig {
    std::string host = "0.0.0.0";
    int port = 8642;
    std::size_t job_workers = 2;
    /// Trained models and uploaded corpora are written here.
    std::filesystem::path data_dir = "embex-data";
    /// Enables graph persistence under this directory.
    std::optional<std::filesystem::path> graph_dir;
    bool cors = true;
    std::size_t max_k = 1000;
};

/// Applies EMBEX_HOST / EMBEX_PORT when set.
ServiceConfig apply_environment(ServiceConfig config);

/// HTTP/JSON front end over the engine: model registry, similarity and
/// analogy queries, asynchronous t-SNE and training jobs, and per-session
/// similarity graphs. No authentication.
class Server {
public:
    explicit Server(ServiceConfig config = {});
    ~Server();
    Server(const Server &) = delete;
    Server &operator=(const Server &) = delete;

    ModelRegistry &models();
    CorpusRegistry &corpora();
    JobManager &jobs();
    GraphStore &graphs();
    const ServiceConfig &config() const;

    /// Reads "models.json": either a list of {id, path, meta_path?} or an
    /// object {"models": [...], "corpora": [{id, path, format}]}. Models that
    /// fail to load are registered in the failed state.
    void load_config(const std::filesystem::path &path);

    /// Binds the listening socket; port 0 picks a free port. Returns the port.
    int bind(const std::string &host, int port);
    /// Serves on the bound socket until stop().
    void serve();
    /// bind() + serve() on a background thread; returns the port.
    int start(const std::string &host = "127.0.0.1", int port = 0);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace embex::service
