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

#include <nlohmann/json.hpp>

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

namespace embex::service {

enum class JobKind { tsne, train };
enum class JobState { pending, running, done, failed };

std::string_view to_string(JobKind kind) noexcept;
std::string_view to_string(JobState state) noexcept;

struct JobSnapshot {
    std::string id;
    JobKind kind = JobKind::tsne;
    JobState state = JobState::pending;
    nlohmann::json progress = nlohmann::json::object();
    std::string error;
};

/// JobHandle encoding: {id, kind, state, progress, result_ref?, error?}.
void to_json(nlohmann::json &j, const JobSnapshot &s);

/// Handed to running work for publishing progress snapshots.
class JobContext {
public:
    explicit JobContext(std::function<void(nlohmann::json)> publish) : publish_(std::move(publish)) {}
    void set_progress(nlohmann::json progress) const { publish_(std::move(progress)); }

private:
    std::function<void(nlohmann::json)> publish_;
};

/// Fixed pool of background workers running t-SNE and training jobs.
/// Workers run at reduced scheduling priority where the platform allows.
class JobManager {
public:
    using Work = std::function<nlohmann::json(std::stop_token, const JobContext &)>;

    explicit JobManager(std::size_t workers = 2);
    ~JobManager();
    JobManager(const JobManager &) = delete;
    JobManager &operator=(const JobManager &) = delete;

    std::string submit(JobKind kind, Work work);

    /// Error(unknown_job) when absent.
    JobSnapshot get(const std::string &id) const;
    /// Result of a finished job; Error(job_not_done) / Error(job_failed).
    nlohmann::json result(const std::string &id) const;
    std::vector<JobSnapshot> list() const;

    /// Blocks until the job leaves pending/running or the timeout passes.
    JobSnapshot wait(const std::string &id, std::chrono::milliseconds timeout) const;

private:
    struct Job {
        JobSnapshot snap;
        Work work;
        nlohmann::json result;
    };

    void worker_loop(std::stop_token stop);
    std::shared_ptr<Job> find(const std::string &id) const;

    mutable std::mutex mutex_;
    mutable std::condition_variable_any changed_;
    std::condition_variable_any queued_;
    std::deque<std::shared_ptr<Job>> queue_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::size_t next_id_ = 1;
    std::vector<std::jthread> workers_;
};

} // namespace embex::service
