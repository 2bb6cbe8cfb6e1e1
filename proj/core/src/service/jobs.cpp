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

#include "embex/service/jobs.hpp"

#include "embex/error.hpp"

#ifdef __linux__
#include <sys/resource.h>
#include <sys/syscall.h>
#include <unistd.h>
#endif

namespace embex::service {

namespace {

constexpr int kWorkerNice = 10;

void lower_thread_priority() {
#ifdef __linux__
    // Linux applies nice values per thread.
    setpriority(PRIO_PROCESS, static_cast<id_t>(syscall(SYS_gettid)), kWorkerNice);
#endif
}

} // namespace

std::string_view to_string(JobKind kind) noexcept { return kind == JobKind::tsne ? "tsne" : "train"; }

std::string_view to_string(JobState state) noexcept {
    switch (state) {
    case JobState::pending: return "pending";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    }
    return "failed";
}

void to_json(nlohmann::json &j, const JobSnapshot &s) {
    j = nlohmann::json{{"id", s.id}, {"kind", to_string(s.kind)}, {"state", to_string(s.state)}, {"progress", s.progress}};
    if (s.state == JobState::done) j["result_ref"] = "/jobs/" + s.id + "/result";
    if (!s.error.empty()) j["error"] = s.error;
}

JobManager::JobManager(std::size_t workers) {
    if (workers == 0) workers = 1;
    workers_.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i)
        workers_.emplace_back([this](std::stop_token st) { worker_loop(st); });
}

JobManager::~JobManager() {
    for (auto &w : workers_) w.request_stop();
    queued_.notify_all();
    workers_.clear();   // joins
}

std::string JobManager::submit(JobKind kind, Work work) {
    auto job = std::make_shared<Job>();
    job->snap.kind = kind;
    job->work = std::move(work);
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "j" + std::to_string(next_id_++);
        job->snap.id = id;
        jobs_.emplace(id, job);
        queue_.push_back(job);
    }
    queued_.notify_one();
    return id;
}

void JobManager::worker_loop(std::stop_token stop) {
    lower_thread_priority();
    for (;;) {
        std::shared_ptr<Job> job;
        {
            std::unique_lock lock(mutex_);
            if (!queued_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
            job = std::move(queue_.front());
            queue_.pop_front();
            job->snap.state = JobState::running;
        }
        changed_.notify_all();

        const JobContext ctx([this, job](nlohmann::json progress) {
            std::lock_guard lock(mutex_);
            job->snap.progress = std::move(progress);
        });
        nlohmann::json result;
        std::string error;
        bool ok = false;
        try {
            result = job->work(stop, ctx);
            ok = true;
        } catch (const Error &e) {
            error = std::string(to_string(e.code())) + ": " + e.what();
        } catch (const std::exception &e) {
            error = e.what();
        } catch (...) {
            error = "unknown failure";
        }
        {
            std::lock_guard lock(mutex_);
            job->work = nullptr;
            if (ok) {
                job->result = std::move(result);
                job->snap.state = JobState::done;
            } else {
                job->snap.state = JobState::failed;
                job->snap.error = error;
            }
        }
        changed_.notify_all();
    }
}

std::shared_ptr<JobManager::Job> JobManager::find(const std::string &id) const {
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw Error(ErrorCode::unknown_job, "unknown job '" + id + "'");
    return it->second;
}

JobSnapshot JobManager::get(const std::string &id) const {
    std::lock_guard lock(mutex_);
    return find(id)->snap;
}

nlohmann::json JobManager::result(const std::string &id) const {
    std::lock_guard lock(mutex_);
    const auto job = find(id);
    if (job->snap.state == JobState::failed)
        throw Error(ErrorCode::job_failed, "job '" + id + "' failed: " + job->snap.error);
    if (job->snap.state != JobState::done)
        throw Error(ErrorCode::job_not_done, "job '" + id + "' is " + std::string(to_string(job->snap.state)));
    return job->result;
}

std::vector<JobSnapshot> JobManager::list() const {
    std::lock_guard lock(mutex_);
    std::vector<JobSnapshot> out;
    for (const auto &[id, job] : jobs_) out.push_back(job->snap);
    return out;
}

JobSnapshot JobManager::wait(const std::string &id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    const auto job = find(id);
    changed_.wait_for(lock, timeout, [&] {
        return job->snap.state == JobState::done || job->snap.state == JobState::failed;
    });
    return job->snap;
}

} // namespace embex::service
