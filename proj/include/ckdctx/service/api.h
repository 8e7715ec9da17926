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


#ifndef CKDCTX_SERVICE_API_H_
#define CKDCTX_SERVICE_API_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ckdctx/common/json_util.h"
#include "ckdctx/pipeline/config.h"
#include "ckdctx/pipeline/loaded.h"
#include "ckdctx/pipeline/workspace.h"
#include "ckdctx/service/jobs.h"

namespace ckdctx::service {

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::string authorization;  // raw Authorization header
};

struct Response {
  int status = 200;
  std::string body;
};

struct Endpoint {
  std::string id;
  std::string method;
  std::string path;  // template, "/v1/patients/{id}/risk"
  std::string summary;
  Json request_schema;  // null when the endpoint takes no body
  std::vector<std::string> query;  // integer query parameters
  std::string response;  // component schema name
  std::vector<int> statuses;
};

const std::vector<Endpoint>& Endpoints();
// Component schemas shared by the OpenAPI document.
Json ComponentSchemas();
// OpenAPI 3.0 description built from Endpoints() and ComponentSchemas().
Json OpenApi();

// Transport-independent request handler. GET handlers read one snapshot
// per request; every mutation is queued as a job.
class Service {
 public:
  explicit Service(pipeline::PipelineConfig config);

  Response Handle(const Request& request);
  void WaitIdle() { jobs_.WaitIdle(); }
  pipeline::Workspace& workspace() { return workspace_; }
  const pipeline::PipelineConfig& config() const { return config_; }

 private:
  std::shared_ptr<const pipeline::LoadedStores> Load();
  Response Dispatch(const Endpoint& endpoint,
                    const std::map<std::string, std::string>& params,
                    const Request& request, const Json& body);
  Response Submit(JobKind kind, const Json& body, std::string conflict_key,
                  JobQueue::Work work);
  pipeline::PipelineConfig Seeded(const Json& body) const;

  pipeline::PipelineConfig config_;
  pipeline::Workspace workspace_;
  std::mutex load_mutex_;
  std::shared_ptr<const pipeline::LoadedStores> loaded_;
  JobQueue jobs_;  // last: its workers use the members above
};

}  // namespace ckdctx::service

#endif  // CKDCTX_SERVICE_API_H_
