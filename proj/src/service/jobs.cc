// Copyright 2026 The ckdctx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ckdctx/service/jobs.h"

#include <cstdio>

#include "ckdctx/common/error.h"

namespace ckdctx::service {

std::string_view JobKindName(JobKind kind) {
  switch (kind) {
    case JobKind::kCohort:
      return "cohort";
    case JobKind::kTrain:
      return "train";
    case JobKind::kExplain:
      return "explain";
    case JobKind::kIngest:
      return "ingest";
  }
  return "";
}

std::string_view JobStateName(JobState state) {
  switch (state) {
    case JobState::kQueued:
      return "queued";
    case JobState::kRunning:
      return "running";
    case JobState::kDone:
      return "done";
    case JobState::kFailed:
      return "failed";
  }
  return "";
}

Json ToJson(const JobRecord& job) {
  Json out = {{"job_id", job.job_id},
              {"kind", JobKindName(job.kind)},
              {"state", JobStateName(job.state)},
              {"request", job.request}};
  if (job.state == JobState::kDone) out["result"] = job.result;
  if (job.state == JobState::kFailed) out["error"] = job.error;
  return out;
}

JobQueue::JobQueue(int workers) {
  if (workers < 1) {
    throw Error(ErrorCode::kConfig, "workers must be positive", "workers");
  }
  for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { Loop(); });
}

JobQueue::~JobQueue() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (std::thread& t : threads_) t.join();
}

JobRecord JobQueue::Submit(JobKind kind, Json request,
                           std::string conflict_key, Work work) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!conflict_key.empty()) {
    for (const auto& [id, entry] : jobs_) {
      const JobState s = entry.record.state;
      if (entry.conflict_key == conflict_key &&
          (s == JobState::kQueued || s == JobState::kRunning)) {
        throw Error(ErrorCode::kConflict,
                    "job " + id + " (" + conflict_key + ") is still " +
                        std::string(JobStateName(s)),
                    "kind");
      }
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "job-%06llu",
                static_cast<unsigned long long>(next_id_++));
  Entry entry;
  entry.record.job_id = buf;
  entry.record.kind = kind;
  entry.record.request = std::move(request);
  entry.conflict_key = std::move(conflict_key);
  entry.work = std::move(work);
  const JobRecord record = entry.record;
  jobs_.emplace(record.job_id, std::move(entry));
  pending_.push_back(record.job_id);
  wake_.notify_one();
  return record;
}

std::optional<JobRecord> JobQueue::Get(const std::string& job_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second.record;
}

void JobQueue::WaitIdle() {
  std::unique_lock<std::mutex> lock(mutex_);
  idle_.wait(lock, [this] { return pending_.empty() && running_ == 0; });
}

void JobQueue::Loop() {
  for (;;) {
    std::unique_lock<std::mutex> lock(mutex_);
    wake_.wait(lock, [this] { return stop_ || !pending_.empty(); });
    if (stop_) return;
    Entry& entry = jobs_.at(pending_.front());
    pending_.pop_front();
    entry.record.state = JobState::kRunning;
    ++running_;
    Work work = entry.work;
    lock.unlock();

    Json result;
    Json error;
    try {
      result = work();
    } catch (const Error& e) {
      error = {{"code", ErrorCodeName(e.code())}, {"message", e.what()}};
      if (!e.path().empty()) error["path"] = e.path();
    } catch (const std::exception& e) {
      error = {{"code", "internal"}, {"message", e.what()}};
    }

    lock.lock();
    if (error.is_null()) {
      entry.record.state = JobState::kDone;
      entry.record.result = std::move(result);
    } else {
      entry.record.state = JobState::kFailed;
      entry.record.error = std::move(error);
    }
    entry.work = nullptr;
    --running_;
    if (pending_.empty() && running_ == 0) idle_.notify_all();
  }
}

}  // namespace ckdctx::service
