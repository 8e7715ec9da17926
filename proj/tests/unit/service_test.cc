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


#include <atomic>
#include <chrono>
#include <filesystem>
#include <future>
#include <string>

#include "ckdctx/common/error.h"
#include "ckdctx/pipeline/stages.h"
#include "ckdctx/service/api.h"
#include "ckdctx/service/jobs.h"
#include "ckdctx/service/schema.h"
#include "ckdctx/service/server.h"
#include "gtest/gtest.h"
#include "httplib.h"

namespace ckdctx::service {
namespace {

namespace fs = std::filesystem;

const fs::path kData = CKDCTX_DATA_DIR;

template <typename Fn>
Error ErrorOf(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorCode::kIo, "");
}

pipeline::PipelineConfig SmallConfig(const std::string& name) {
  Json json = {
      {"seed", 3},
      {"synth", {{"n_patients", 600}, {"n_ccs_features", 12}}},
      {"train",
       {{"LR", {{"epochs", 5}}},
        {"MLP", {{"epochs", 5}, {"hidden_sizes", {8}}}}}},
      {"explain", {{"n_samples", 100}, {"max_patients", 8}}},
      {"prototypes", {{"k", 5}}},
  };
  const fs::path dir = fs::temp_directory_path() / ("ckdctx_service_" + name);
  fs::remove_all(dir);
  json["data_dir"] = dir.string();
  return pipeline::PipelineConfig::FromJson(json, kData);
}

Response Call(Service& s, const std::string& method, const std::string& path,
              const std::string& body = "",
              std::map<std::string, std::string> query = {}) {
  return s.Handle({method, path, std::move(query), body, ""});
}

Json BodyOf(const Response& r) { return ParseJson(r.body, "response"); }

// Submits a job and waits for it; returns the final record.
Json RunJob(Service& s, const std::string& path, const Json& body) {
  const Response r = Call(s, "POST", path, body.dump());
  EXPECT_EQ(r.status, 202) << r.body;
  s.WaitIdle();
  return BodyOf(Call(s, "GET", "/v1/jobs/" + BodyOf(r)["job_id"].get<std::string>()));
}

void BuildAll(Service& s) {
  EXPECT_EQ(RunJob(s, "/v1/cohort/build", Json::object())["state"], "done");
  EXPECT_EQ(RunJob(s, "/v1/models/train", {{"kind", "LR"}})["state"], "done");
  EXPECT_EQ(RunJob(s, "/v1/models/train", {{"kind", "MLP"}})["state"], "done");
  EXPECT_EQ(RunJob(s, "/v1/explanations/build", Json::object())["state"],
            "done");
  EXPECT_EQ(RunJob(s, "/v1/guidelines/ingest", Json::object())["state"],
            "done");
}

TEST(SchemaTest, ReportsFirstViolationPath) {
  const Json schema = {
      {"type", "object"},
      {"additionalProperties", false},
      {"required", {"kind"}},
      {"properties",
       {{"kind", {{"type", "string"}, {"enum", {"LR", "MLP"}}}},
        {"k", {{"type", "integer"}, {"minimum", 1}}},
        {"tags", {{"type", "array"}, {"items", {{"type", "string"}}}}}}}};
  ValidateSchema(schema, {{"kind", "LR"}, {"k", 2}});
  EXPECT_EQ(ErrorOf([&] { ValidateSchema(schema, {{"kind", "SVM"}}); }).path(),
            "/kind");
  EXPECT_EQ(ErrorOf([&] { ValidateSchema(schema, Json::object()); }).path(),
            "/kind");
  EXPECT_EQ(
      ErrorOf([&] { ValidateSchema(schema, {{"kind", "LR"}, {"x", 1}}); })
          .path(),
      "/x");
  EXPECT_EQ(
      ErrorOf([&] { ValidateSchema(schema, {{"kind", "LR"}, {"k", 0}}); })
          .path(),
      "/k");
  EXPECT_EQ(ErrorOf([&] {
              ValidateSchema(schema, {{"kind", "LR"}, {"tags", {"a", 3}}});
            }).path(),
            "/tags/1");
  EXPECT_EQ(ErrorOf([&] { ValidateSchema(schema, Json::array()); }).code(),
            ErrorCode::kValidation);
}

TEST(JobQueueTest, StatesConflictsAndFailures) {
  JobQueue queue(1);
  std::promise<void> release;
  std::shared_future<void> gate = release.get_future().share();
  const JobRecord first = queue.Submit(JobKind::kTrain, {{"kind", "MLP"}},
                                       "train:MLP", [gate] {
                                         gate.wait();
                                         return Json{{"ok", true}};
                                       });
  EXPECT_EQ(first.job_id, "job-000001");
  EXPECT_EQ(first.state, JobState::kQueued);
  const Error e = ErrorOf([&] {
    queue.Submit(JobKind::kTrain, {}, "train:MLP", [] { return Json(); });
  });
  EXPECT_EQ(e.code(), ErrorCode::kConflict);
  const JobRecord other =
      queue.Submit(JobKind::kTrain, {}, "train:LR", [] {
        throw Error(ErrorCode::kDependency, "missing", "features");
        return Json();
      });
  release.set_value();
  queue.WaitIdle();
  EXPECT_EQ(queue.Get(first.job_id)->state, JobState::kDone);
  const JobRecord failed = *queue.Get(other.job_id);
  EXPECT_EQ(failed.state, JobState::kFailed);
  EXPECT_EQ(failed.error["path"], "features");
  EXPECT_EQ(ToJson(failed)["error"]["code"], "dependency_error");
  EXPECT_FALSE(queue.Get("job-999999"));
  // The key is free again once the holder finished.
  queue.Submit(JobKind::kTrain, {}, "train:MLP", [] { return Json(); });
  queue.WaitIdle();
}

TEST(ServiceTest, SchemaAndRoutingErrors) {
  Service s(SmallConfig("errors"));
  Response r = Call(s, "POST", "/v1/models/train", R"({"kind": "SVM"})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(BodyOf(r)["path"], "/kind");
  EXPECT_EQ(BodyOf(r)["code"], "validation_error");
  EXPECT_EQ(Call(s, "GET", "/v1/jobs/unknown").status, 404);
  EXPECT_EQ(Call(s, "GET", "/v1/nothing").status, 404);
  EXPECT_EQ(Call(s, "DELETE", "/v1/jobs/x").status, 405);
  EXPECT_EQ(Call(s, "POST", "/v1/qa/ask", "{not json").status, 400);
  r = Call(s, "POST", "/v1/qa/ask", R"({"question": ""})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(BodyOf(r)["path"], "/question");
  r = Call(s, "POST", "/v1/context/answer", R"({"kind": "Q9"})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(BodyOf(r)["path"], "/kind");
}

TEST(ServiceTest, MissingArtifactsAre409NamingTheJob) {
  Service s(SmallConfig("missing"));
  Response r = Call(s, "GET", "/v1/patients/P000001/explanation");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(BodyOf(r)["path"], "model");
  EXPECT_NE(BodyOf(r)["message"].get<std::string>().find("train job"),
            std::string::npos);
  r = Call(s, "POST", "/v1/qa/ask", R"({"question": "insulin"})");
  EXPECT_EQ(r.status, 409);
  EXPECT_NE(r.body.find("ingest"), std::string::npos);
  r = Call(s, "GET", "/v1/prototypes");
  EXPECT_EQ(r.status, 409);
  EXPECT_NE(r.body.find("explain"), std::string::npos);
  EXPECT_EQ(Call(s, "GET", "/v1/models/MLP/metrics").status, 409);
  EXPECT_EQ(Call(s, "GET", "/v1/models/SVM/metrics").status, 404);
  // A job whose inputs are missing fails with the same error body.
  const Json job = RunJob(s, "/v1/models/train", {{"kind", "LR"}});
  EXPECT_EQ(job["state"], "failed");
  EXPECT_EQ(job["error"]["code"], "dependency_error");
}

TEST(ServiceTest, EndToEndOverJobs) {
  Service s(SmallConfig("e2e"));
  BuildAll(s);
  Response r = Call(s, "GET", "/v1/models/MLP/metrics");
  ASSERT_EQ(r.status, 200);
  EXPECT_GT(BodyOf(r)["auc_roc"].get<double>(), 0.5);
  EXPECT_EQ(r.body, s.workspace().Current().Read("metrics_MLP.json"));

  r = Call(s, "GET", "/v1/prototypes", "", {{"k", "5"}});
  ASSERT_EQ(r.status, 200) << r.body;
  const Json protos = BodyOf(r);
  EXPECT_EQ(protos["prototypes"].size(),
            std::min<std::size_t>(5, protos["pool_size"]));
  const std::string pid = protos["prototypes"][0]["patient_id"];
  r = Call(s, "GET", "/v1/prototypes", "", {{"k", "2"}});
  EXPECT_EQ(BodyOf(r)["prototypes"].size(), 2u);
  EXPECT_EQ(Call(s, "GET", "/v1/prototypes", "", {{"k", "0"}}).status, 400);
  EXPECT_EQ(Call(s, "GET", "/v1/prototypes", "", {{"k", "x"}}).status, 400);

  r = Call(s, "GET", "/v1/prototypes/summary");
  EXPECT_EQ(BodyOf(r)["n"], 5);
  r = Call(s, "GET", "/v1/patients/" + pid + "/risk");
  ASSERT_EQ(r.status, 200);
  const std::string display = BodyOf(r)["display"];
  EXPECT_EQ(display.size(), 4u);
  EXPECT_EQ(Call(s, "GET", "/v1/patients/nobody/risk").status, 404);
  r = Call(s, "GET", "/v1/patients/" + pid + "/explanation");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(BodyOf(r)["patient_id"], pid);
  r = Call(s, "GET", "/v1/explanations/aggregate", "", {{"top", "3"}});
  EXPECT_EQ(BodyOf(r)["entries"].size(), 3u);

  r = Call(s, "POST", "/v1/qa/ask",
           R"({"question": "What should be done if A1C levels are greater than 10?"})");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(BodyOf(r)["answers"][0]["rec_id"], "9.1.5");
  EXPECT_GT(BodyOf(r)["answers"][0]["numeric_bonus"].get<double>(), 0.0);
  EXPECT_EQ(Call(s, "POST", "/v1/qa/ask",
                 R"({"question": "insulin", "patient_id": "nobody"})")
                .status,
            404);

  r = Call(s, "POST", "/v1/context/answer",
           Json{{"kind", "Q4"}, {"patient_id", pid}}.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_NE(BodyOf(r)["text"].get<std::string>().find(
                "risk is found to be " + display),
            std::string::npos);
  r = Call(s, "POST", "/v1/context/answer", R"({"kind": "Q2"})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(BodyOf(r)["path"], "patient_id");

  // GETs are pure over an unchanged snapshot.
  for (const char* path :
       {"/v1/prototypes", "/v1/prototypes/summary", "/v1/explanations/aggregate",
        "/v1/spec", "/v1/snapshot"}) {
    EXPECT_EQ(Call(s, "GET", path).body, Call(s, "GET", path).body) << path;
  }
}

TEST(ServiceTest, JobArtifactsMatchDirectStageCalls) {
  const pipeline::PipelineConfig config = SmallConfig("identity");
  Service s(config);
  BuildAll(s);
  pipeline::Workspace direct(fs::path(config.data_dir).string() + "_direct");
  direct.Commit(pipeline::RunGenerateData(config));
  direct.Commit(pipeline::RunBuildCohort(config, direct.Current()));
  direct.Commit(pipeline::RunTrain(config, direct.Current(), risk::ModelKind::kLR));
  direct.Commit(
      pipeline::RunTrain(config, direct.Current(), risk::ModelKind::kMLP));
  direct.Commit(pipeline::RunExplain(config, direct.Current()));
  direct.Commit(pipeline::RunPrototypes(config, direct.Current()));
  direct.Commit(pipeline::RunIngest(config));
  const pipeline::Snapshot a = s.workspace().Current();
  const pipeline::Snapshot b = direct.Current();
  EXPECT_EQ(a.manifest().artifacts, b.manifest().artifacts);
  fs::remove_all(fs::path(config.data_dir).string() + "_direct");
}

TEST(ServiceTest, RequestSeedOverridesConfigSeed) {
  const pipeline::PipelineConfig config = SmallConfig("seeded");
  Service s(config);
  RunJob(s, "/v1/cohort/build", {{"seed", 4}});
  pipeline::PipelineConfig reseeded = config;
  reseeded.seed = 4;
  EXPECT_EQ(s.workspace().Current().Read(pipeline::kClaims),
            pipeline::RunGenerateData(reseeded).at(pipeline::kClaims));
}

TEST(ServiceTest, OpenApiCoversEveryEndpoint) {
  const Json spec = OpenApi();
  EXPECT_EQ(spec["openapi"], "3.0.3");
  for (const Endpoint& e : Endpoints()) {
    std::string method = e.method;
    for (char& c : method) c = static_cast<char>(std::tolower(c));
    ASSERT_TRUE(spec["paths"].contains(e.path)) << e.path;
    const Json& op = spec["paths"][e.path][method];
    EXPECT_EQ(op["operationId"], e.id);
    if (!e.request_schema.is_null()) {
      EXPECT_EQ(op["requestBody"]["content"]["application/json"]["schema"],
                e.request_schema);
    }
    for (const auto& [status, response] : op["responses"].items()) {
      const std::string ref =
          response["content"]["application/json"]["schema"]["$ref"];
      const std::string name = ref.substr(ref.rfind('/') + 1);
      EXPECT_TRUE(spec["components"]["schemas"].contains(name)) << ref;
    }
  }
  EXPECT_TRUE(spec["paths"]["/v1/models/train"]["post"]["responses"]
                  .contains("409"));
}

TEST(ServiceTest, BearerTokenIsEnforced) {
  pipeline::PipelineConfig config = SmallConfig("auth");
  config.service.token = "s3cret";
  Service s(config);
  EXPECT_EQ(Call(s, "GET", "/v1/health").status, 401);
  EXPECT_EQ(s.Handle({"GET", "/v1/health", {}, "", "Bearer s3cret"}).status,
            200);
}

TEST(HttpServerTest, ServesOverTheWire) {
  Service s(SmallConfig("http"));
  HttpServer server(s);
  const int port = server.Start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(ParseJson(res->body, "health")["status"], "ok");
  res = client.Post("/v1/models/train", R"({"kind": "SVM"})",
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = client.Get("/v1/prototypes?k=abc");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = client.Get("/v1/spec");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, DumpCanonical(OpenApi()));
  server.Stop();
}

}  // namespace
}  // namespace ckdctx::service
