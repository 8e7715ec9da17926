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


#ifndef CKDCTX_SERVICE_JOBS_H_
#define CKDCTX_SERVICE_JOBS_H_

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ckdctx/common/json_util.h"

namespace ckdctx::service {

enum class JobKind { kCohort, kTrain, kExplain, kIngest };
enum class JobState { kQueued, kRunning, kDone, kFailed };

std::string_view JobKindName(JobKind kind);
std::string_view JobStateName(JobState state);

struct JobRecord {
  std::string job_id;
  JobKind kind = JobKind::kCohort;
  JobState state = JobState::kQueued;
  Json request;
  Json result;  // set when done
  Json error;   // {code, message, path?} when failed
};

Json ToJson(const JobRecord& job);

// In-process queue drained by `workers` threads. Jobs whose conflict keys
// match may not be queued or running at the same time. Ids are sequential
// ("job-000001") so runs are reproducible.
class JobQueue {
 public:
  using Work = std::function<Json()>;

  explicit JobQueue(int workers = 1);
  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  // Throws kConflict when an unfinished job holds `conflict_key`.
  JobRecord Submit(JobKind kind, Json request, std::string conflict_key,
                   Work work);
  std::optional<JobRecord> Get(const std::string& job_id) const;
  // Blocks until nothing is queued or running.
  void WaitIdle();

 private:
  struct Entry {
    JobRecord record;
    std::string conflict_key;
    Work work;
  };
  void Loop();

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::map<std::string, Entry> jobs_;
  std::deque<std::string> pending_;
  int running_ = 0;
  std::uint64_t next_id_ = 1;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace ckdctx::service

#endif  // CKDCTX_SERVICE_JOBS_H_
