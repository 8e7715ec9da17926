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


#include "ckdctx/service/api.h"

#include <algorithm>
#include <sstream>

#include "ckdctx/common/error.h"
#include "ckdctx/context/answer.h"
#include "ckdctx/context/bundle.h"
#include "ckdctx/explain/aggregate.h"
#include "ckdctx/pipeline/stages.h"
#include "ckdctx/service/schema.h"

namespace ckdctx::service {
namespace {

using pipeline::Artifacts;

Json Ref(const std::string& name) {
  return {{"$ref", "#/components/schemas/" + name}};
}

const Json kSeed = {{"type", "integer"}, {"minimum", 0}};

std::vector<std::string> Segments(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

bool MatchPath(const std::string& pattern, const std::string& path,
               std::map<std::string, std::string>* params) {
  const auto want = Segments(pattern);
  const auto got = Segments(path);
  if (want.size() != got.size()) return false;
  std::map<std::string, std::string> found;
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i].front() == '{') {
      found[want[i].substr(1, want[i].size() - 2)] = got[i];
    } else if (want[i] != got[i]) {
      return false;
    }
  }
  *params = std::move(found);
  return true;
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation:
    case ErrorCode::kInput:
    case ErrorCode::kConfig:
    case ErrorCode::kQuery:
    case ErrorCode::kUnsupportedVersion:
    case ErrorCode::kShape:
    case ErrorCode::kStructure:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kDependency:
    case ErrorCode::kConflict:
      return 409;
    default:
      return 500;
  }
}

// Store or artifact name -> job that builds it.
std::string JobFor(const std::string& name) {
  if (name == "features" || name == "split" || name == "ccs_map") {
    return "cohort";
  }
  if (name == "model") return "train";
  if (name == "explanations" || name == "prototypes") return "explain";
  if (name == "guidelines") return "ingest";
  return pipeline::ProducingJob(name);
}

Response ErrorResponse(int status, std::string_view code,
                       const std::string& message, const std::string& path) {
  Json body = {{"code", code}, {"message", message}};
  if (!path.empty()) body["path"] = path;
  return {status, DumpCanonical(body)};
}

Response Ok(const Json& body, int status = 200) {
  return {status, DumpCanonical(body)};
}

std::size_t QueryInt(const Request& request, const std::string& key,
                     std::size_t fallback) {
  auto it = request.query.find(key);
  if (it == request.query.end()) return fallback;
  const std::string& text = it->second;
  if (text.empty() || text.size() > 6 ||
      !std::all_of(text.begin(), text.end(),
                   [](char c) { return c >= '0' && c <= '9'; }) ||
      std::stoul(text) == 0) {
    throw Error(ErrorCode::kValidation, key + " must be a positive integer",
                key);
  }
  return std::stoul(text);
}

const cohort::FeatureMatrix& FeaturesOf(const pipeline::LoadedStores& l) {
  return l.RequireFeatures();
}

int PatientRow(const pipeline::LoadedStores& loaded, const std::string& id) {
  const int row = FeaturesOf(loaded).FindPatient(id);
  if (row < 0) {
    throw Error(ErrorCode::kNotFound, "unknown patient '" + id + "'",
                "patient_id");
  }
  return row;
}

Json ResultOf(const pipeline::Snapshot& snapshot, const Artifacts& written) {
  Json names = Json::array();
  for (const auto& [name, bytes] : written) names.push_back(name);
  return {{"snapshot", snapshot.sequence()}, {"artifacts", std::move(names)}};
}

}  // namespace

const std::vector<Endpoint>& Endpoints() {
  static const std::vector<Endpoint> endpoints = {
      {"health", "GET", "/v1/health", "Liveness and current snapshot",
       nullptr, {}, "Health", {200}},
      {"spec", "GET", "/v1/spec", "This OpenAPI description", nullptr, {},
       "OpenApi", {200}},
      {"snapshot", "GET", "/v1/snapshot", "Manifest of the current snapshot",
       nullptr, {}, "Manifest", {200}},
      {"cohort_build", "POST", "/v1/cohort/build",
       "Generate claims (unless generate is false), select the cohort and "
       "build features and the split",
       {{"type", "object"},
        {"additionalProperties", false},
        {"properties", {{"seed", kSeed}, {"generate", {{"type", "boolean"}}}}}},
       {}, "JobRecord", {202, 400}},
      {"models_train", "POST", "/v1/models/train",
       "Train and evaluate one risk model",
       {{"type", "object"},
        {"additionalProperties", false},
        {"required", {"kind"}},
        {"properties",
         {{"kind", {{"type", "string"}, {"enum", {"LR", "MLP"}}}},
          {"seed", kSeed}}}},
       {}, "JobRecord", {202, 400, 409}},
      {"explanations_build", "POST", "/v1/explanations/build",
       "Explain the high-risk pool and select prototypes",
       {{"type", "object"},
        {"additionalProperties", false},
        {"properties", {{"seed", kSeed}}}},
       {}, "JobRecord", {202, 400}},
      {"guidelines_ingest", "POST", "/v1/guidelines/ingest",
       "Parse guideline HTML (inline or the configured file)",
       {{"type", "object"},
        {"additionalProperties", false},
        {"properties",
         {{"html", {{"type", "string"}, {"minLength", 1}}},
          {"parse_config", {{"type", "object"}}}}}},
       {}, "JobRecord", {202, 400}},
      {"job_get", "GET", "/v1/jobs/{id}", "Job state", nullptr, {},
       "JobRecord", {200, 404}},
      {"model_metrics", "GET", "/v1/models/{id}/metrics",
       "Test-split metrics of a trained model", nullptr, {}, "MetricsReport",
       {200, 404, 409}},
      {"prototypes", "GET", "/v1/prototypes",
       "Prototypical high-risk patients", nullptr, {"k"}, "PrototypeList",
       {200, 400, 409}},
      {"prototypes_summary", "GET", "/v1/prototypes/summary",
       "Baseline summary of the stored prototypes", nullptr, {},
       "PrototypeSummary", {200, 409}},
      {"patient_risk", "GET", "/v1/patients/{id}/risk",
       "Predicted CKD risk", nullptr, {}, "Risk", {200, 404, 409}},
      {"patient_explanation", "GET", "/v1/patients/{id}/explanation",
       "Per-feature attribution", nullptr, {}, "Attribution",
       {200, 404, 409}},
      {"explanations_aggregate", "GET", "/v1/explanations/aggregate",
       "Mean |phi| ranking over the explained patients", nullptr, {"top"},
       "ImportanceRanking", {200, 400, 409}},
      {"qa_ask", "POST", "/v1/qa/ask", "Ranked guideline answers",
       {{"type", "object"},
        {"additionalProperties", false},
        {"required", {"question"}},
        {"properties",
         {{"question", {{"type", "string"}, {"minLength", 1}}},
          {"k", {{"type", "integer"}, {"minimum", 1}}},
          {"patient_id", {{"type", "string"}}}}}},
       {}, "QaAnswers", {200, 400, 404, 409}},
      {"context_answer", "POST", "/v1/context/answer",
       "Contextualized answer bundle for a question kind",
       {{"type", "object"},
        {"additionalProperties", false},
        {"required", {"kind"}},
        {"properties",
         {{"kind",
           {{"type", "string"},
            {"enum", {"Q1", "Q2", "Q3", "Q3a", "Q4", "Q5", "Q6", "FreeText"}}}},
          {"patient_id", {{"type", "string"}}},
          {"question", {{"type", "string"}}}}}},
       {}, "ContextAnswer", {200, 400, 404, 409}},
  };
  return endpoints;
}

Json ComponentSchemas() {
  const Json number = {{"type", "number"}};
  const Json string = {{"type", "string"}};
  const Json integer = {{"type", "integer"}};
  const Json strings = {{"type", "array"}, {"items", string}};
  return {
      {"Error",
       {{"type", "object"},
        {"required", {"code", "message"}},
        {"properties",
         {{"code", string}, {"message", string}, {"path", string}}}}},
      {"Health",
       {{"type", "object"},
        {"properties", {{"status", string}, {"snapshot", integer}}}}},
      {"OpenApi", {{"type", "object"}}},
      {"Manifest",
       {{"type", "object"},
        {"properties",
         {{"format_version", integer},
          {"sequence", integer},
          {"snapshot", string},
          {"artifacts",
           {{"type", "object"}, {"additionalProperties", string}}}}}}},
      {"JobRecord",
       {{"type", "object"},
        {"required", {"job_id", "kind", "state", "request"}},
        {"properties",
         {{"job_id", string},
          {"kind",
           {{"type", "string"},
            {"enum", {"cohort", "train", "explain", "ingest"}}}},
          {"state",
           {{"type", "string"},
            {"enum", {"queued", "running", "done", "failed"}}}},
          {"request", {{"type", "object"}}},
          {"result",
           {{"type", "object"},
            {"properties", {{"snapshot", integer}, {"artifacts", strings}}}}},
          {"error", Ref("Error")}}}}},
      {"MetricsReport",
       {{"type", "object"},
        {"properties",
         {{"precision", number},
          {"recall", number},
          {"auc_roc", number},
          {"auc_prc", number},
          {"brier", number},
          {"threshold", number},
          {"precision_undefined", {{"type", "boolean"}}},
          {"n", integer},
          {"n_positive", integer}}}}},
      {"PrototypeList",
       {{"type", "object"},
        {"properties",
         {{"k", integer},
          {"pool_size", integer},
          {"bandwidth", number},
          {"prototypes",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"properties",
               {{"patient_id", string},
                {"weight", number},
                {"risk", number}}}}}}}}}}},
      {"PrototypeSummary",
       {{"type", "object"},
        {"properties",
         {{"n", integer},
          {"high_prevalence_percent", integer},
          {"patient_ids", strings},
          {"rows",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"properties",
               {{"label", string},
                {"count", integer},
                {"display", string},
                {"high_prevalence", {{"type", "boolean"}}}}}}}}}}}}},
      {"Risk",
       {{"type", "object"},
        {"properties",
         {{"patient_id", string},
          {"model_id", string},
          {"risk", number},
          {"display", string}}}}},
      {"Attribution",
       {{"type", "object"},
        {"properties",
         {{"patient_id", string},
          {"feature_names", strings},
          {"feature_values", {{"type", "array"}, {"items", number}}},
          {"phi", {{"type", "array"}, {"items", number}}},
          {"baseline_value", number},
          {"prediction", number},
          {"method", string}}}}},
      {"ImportanceRanking",
       {{"type", "object"},
        {"properties",
         {{"top", integer},
          {"n_patients", integer},
          {"entries",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"properties",
               {{"feature", string},
                {"mean_abs_phi", number},
                {"spread", {{"type", "array"}}}}}}}}}}}}},
      {"QaAnswers",
       {{"type", "object"},
        {"properties",
         {{"question", string},
          {"k", integer},
          {"answers",
           {{"type", "array"},
            {"items",
             {{"type", "object"},
              {"properties",
               {{"rec_id", string},
                {"answer_text", string},
                {"lexical_score", number},
                {"numeric_bonus", number},
                {"total", number},
                {"matched_constraints", {{"type", "array"}}}}}}}}}}}}},
      {"ContextAnswer",
       {{"type", "object"},
        {"properties",
         {{"bundle",
           {{"type", "object"},
            {"properties",
             {{"question", string},
              {"kind", string},
              {"annotation", {{"type", "object"}}},
              {"patient_id", string},
              {"parts", {{"type", "array"}}}}}}},
          {"text", string}}}}},
  };
}

Json OpenApi() {
  Json paths = Json::object();
  for (const Endpoint& e : Endpoints()) {
    Json op = {{"operationId", e.id}, {"summary", e.summary}};
    Json params = Json::array();
    for (const std::string& seg : Segments(e.path)) {
      if (seg.front() == '{') {
        params.push_back({{"name", seg.substr(1, seg.size() - 2)},
                          {"in", "path"},
                          {"required", true},
                          {"schema", {{"type", "string"}}}});
      }
    }
    for (const std::string& q : e.query) {
      params.push_back({{"name", q},
                        {"in", "query"},
                        {"required", false},
                        {"schema", {{"type", "integer"}, {"minimum", 1}}}});
    }
    if (!params.empty()) op["parameters"] = std::move(params);
    if (!e.request_schema.is_null()) {
      op["requestBody"] = {
          {"required", true},
          {"content", {{"application/json", {{"schema", e.request_schema}}}}}};
    }
    Json responses = Json::object();
    for (int status : e.statuses) {
      const bool ok = status < 300;
      responses[std::to_string(status)] = {
          {"description", ok ? "success" : "error"},
          {"content",
           {{"application/json",
             {{"schema", Ref(ok ? e.response : "Error")}}}}}};
    }
    op["responses"] = std::move(responses);
    std::string method = e.method;
    std::transform(method.begin(), method.end(), method.begin(), ::tolower);
    paths[e.path][method] = std::move(op);
  }
  // The bearer scheme only applies when the service has a token set.
  return {
      {"openapi", "3.0.3"},
      {"info", {{"title", "ckdctx"}, {"version", "1"}}},
      {"paths", std::move(paths)},
      {"components",
       {{"schemas", ComponentSchemas()},
        {"securitySchemes",
         {{"bearer", {{"type", "http"}, {"scheme", "bearer"}}}}}}},
  };
}

Service::Service(pipeline::PipelineConfig config)
    : config_(std::move(config)),
      workspace_(config_.data_dir),
      jobs_(config_.service.workers) {}

std::shared_ptr<const pipeline::LoadedStores> Service::Load() {
  pipeline::Snapshot snapshot = workspace_.Current();
  std::lock_guard<std::mutex> lock(load_mutex_);
  if (!loaded_ || loaded_->snapshot().sequence() != snapshot.sequence()) {
    loaded_ = std::make_shared<const pipeline::LoadedStores>(
        config_, std::move(snapshot));
  }
  return loaded_;
}

pipeline::PipelineConfig Service::Seeded(const Json& body) const {
  pipeline::PipelineConfig c = config_;
  if (body.contains("seed")) c.seed = body["seed"].get<std::uint64_t>();
  return c;
}

Response Service::Submit(JobKind kind, const Json& body,
                         std::string conflict_key, JobQueue::Work work) {
  return Ok(ToJson(jobs_.Submit(kind, body, std::move(conflict_key),
                                std::move(work))),
            202);
}

Response Service::Handle(const Request& request) {
  try {
    if (!config_.service.token.empty() &&
        request.authorization != "Bearer " + config_.service.token) {
      return ErrorResponse(401, "unauthorized",
                           "missing or invalid bearer token", "");
    }
    const Endpoint* endpoint = nullptr;
    bool path_known = false;
    std::map<std::string, std::string> params;
    for (const Endpoint& e : Endpoints()) {
      std::map<std::string, std::string> p;
      if (!MatchPath(e.path, request.path, &p)) continue;
      path_known = true;
      if (e.method == request.method) {
        endpoint = &e;
        params = std::move(p);
        break;
      }
    }
    if (endpoint == nullptr) {
      return path_known ? ErrorResponse(405, "method_not_allowed",
                                        request.method + " is not supported "
                                        "on " + request.path, "")
                        : ErrorResponse(404, "not_found",
                                        "no route " + request.path, "");
    }
    for (const std::string& key : endpoint->query) QueryInt(request, key, 1);
    Json body;
    if (!endpoint->request_schema.is_null()) {
      body = request.body.empty() ? Json::object()
                                  : ParseJson(request.body, "request body");
      ValidateSchema(endpoint->request_schema, body);
    }
    return Dispatch(*endpoint, params, request, body);
  } catch (const Error& e) {
    std::string message = e.what();
    if (e.code() == ErrorCode::kDependency &&
        message.find(" job") == std::string::npos) {
      message += "; run the " + JobFor(e.path()) + " job";
    }
    return ErrorResponse(StatusFor(e.code()), ErrorCodeName(e.code()), message,
                         e.path());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what(), "");
  }
}

Response Service::Dispatch(const Endpoint& endpoint,
                           const std::map<std::string, std::string>& params,
                           const Request& request, const Json& body) {
  const std::string& id = endpoint.id;
  pipeline::Workspace* ws = &workspace_;

  if (id == "health") {
    return Ok({{"status", "ok"}, {"snapshot", ws->Current().sequence()}});
  }
  if (id == "spec") return Ok(OpenApi());
  if (id == "snapshot") return Ok(ws->Current().manifest().ToJson());

  if (id == "cohort_build") {
    const pipeline::PipelineConfig c = Seeded(body);
    const bool generate = body.value("generate", true);
    return Submit(JobKind::kCohort, body, "cohort", [c, generate, ws] {
      const cohort::CcsMap map = cohort::CcsMap::Load(c.ccs_map.string());
      Artifacts out;
      std::string claims;
      if (generate) {
        out = pipeline::GenerateData(c, map);
        claims = out.at(pipeline::kClaims);
      } else {
        claims = ws->Current().Read(pipeline::kClaims);
      }
      out.merge(pipeline::BuildCohort(c, map, claims));
      return ResultOf(ws->Commit(out), out);
    });
  }
  if (id == "models_train") {
    const pipeline::PipelineConfig c = Seeded(body);
    const risk::ModelKind kind =
        risk::ParseModelKind(body["kind"].get<std::string>());
    return Submit(JobKind::kTrain, body,
                  "train:" + std::string(risk::ModelKindName(kind)),
                  [c, kind, ws] {
                    const Artifacts out =
                        pipeline::RunTrain(c, ws->Current(), kind);
                    return ResultOf(ws->Commit(out), out);
                  });
  }
  if (id == "explanations_build") {
    const pipeline::PipelineConfig c = Seeded(body);
    return Submit(JobKind::kExplain, body, "explain", [c, ws] {
      const pipeline::Snapshot snapshot = ws->Current();
      Artifacts out = pipeline::RunExplain(c, snapshot);
      out.merge(pipeline::RunPrototypes(c, snapshot));
      return ResultOf(ws->Commit(out), out);
    });
  }
  if (id == "guidelines_ingest") {
    const pipeline::PipelineConfig c = config_;
    return Submit(JobKind::kIngest, body, "ingest", [c, body, ws] {
      const std::string html = body.contains("html")
                                   ? body["html"].get<std::string>()
                                   : ReadFile(c.guideline_html);
      const guideline::ParseConfig parse =
          guideline::ParseConfig::FromJson(
              body.contains("parse_config")
                  ? body["parse_config"]
                  : ReadJsonFile(c.guideline_parse_config));
      const Artifacts out = pipeline::IngestGuidelines(html, parse);
      return ResultOf(ws->Commit(out), out);
    });
  }
  if (id == "job_get") {
    const auto job = jobs_.Get(params.at("id"));
    if (!job) {
      throw Error(ErrorCode::kNotFound,
                  "unknown job '" + params.at("id") + "'", "id");
    }
    return Ok(ToJson(*job));
  }

  const auto loaded = Load();
  const context::Stores& stores = loaded->stores();

  if (id == "model_metrics") {
    risk::ModelKind kind;
    try {
      kind = risk::ParseModelKind(params.at("id"));
    } catch (const Error&) {
      throw Error(ErrorCode::kNotFound,
                  "unknown model '" + params.at("id") + "'", "id");
    }
    const risk::MetricsReport* m = loaded->metrics(kind);
    if (m == nullptr) {
      throw Error(ErrorCode::kDependency,
                  "model " + std::string(risk::ModelKindName(kind)) +
                      " has not been trained; run the train job",
                  "model");
    }
    return Ok(risk::ToJson(*m));
  }
  if (id == "prototypes") {
    const context::PrototypeStore& stored = loaded->RequirePrototypes();
    const risk::RiskModel& model = loaded->RequireModel();
    const cohort::FeatureMatrix& features = loaded->RequireFeatures();
    const risk::Split& split = loaded->RequireSplit();
    const std::size_t k = QueryInt(request, "k", config_.prototypes.k);
    const context::PrototypeStore picked =
        k == config_.prototypes.k
            ? stored
            : pipeline::SelectPrototypes(config_, loaded->ccs_map(), model,
                                         features, split, k);
    const auto pool = pipeline::HighRiskPool(
        model, features, split, config_.explain.high_risk_threshold,
        config_.prototypes.k);
    Json list = Json::array();
    for (std::size_t i = 0; i < picked.patient_ids.size(); ++i) {
      const std::string& pid = picked.patient_ids[i];
      list.push_back(
          {{"patient_id", pid},
           {"weight", picked.set.weights[i]},
           {"risk", model.PredictProba(
                        features.rows[features.FindPatient(pid)])}});
    }
    return Ok({{"k", k},
               {"pool_size", pool.size()},
               {"bandwidth", picked.set.kernel.bandwidth},
               {"prototypes", std::move(list)}});
  }
  if (id == "prototypes_summary") {
    const context::PrototypeStore& stored = loaded->RequirePrototypes();
    Json summary = explain::ToJson(stored.summary);
    for (std::size_t i = 0; i < stored.summary.rows.size(); ++i) {
      summary["rows"][i]["display"] =
          stored.summary.FormatCount(stored.summary.rows[i]);
    }
    summary["patient_ids"] = stored.patient_ids;
    summary["table"] = stored.summary.RenderText();
    return Ok(summary);
  }
  if (id == "patient_risk") {
    const risk::RiskModel& model = loaded->RequireModel();
    const std::string& pid = params.at("id");
    const double risk =
        model.PredictProba(FeaturesOf(*loaded).rows[PatientRow(*loaded, pid)]);
    return Ok({{"patient_id", pid},
               {"model_id", stores.model_id},
               {"risk", risk},
               {"display", FormatFixed(risk, 2)}});
  }
  if (id == "patient_explanation") {
    loaded->RequireModel();
    const std::string& pid = params.at("id");
    PatientRow(*loaded, pid);
    return Ok(explain::ToJson(context::AttributionFor(stores, pid)));
  }
  if (id == "explanations_aggregate") {
    const context::ExplanationStore& store = loaded->RequireExplanations();
    const std::size_t top = QueryInt(request, "top", 20);
    std::vector<explain::Attribution> attributions;
    for (const auto& [pid, a] : store.by_patient) attributions.push_back(a);
    Json entries = Json::array();
    if (!attributions.empty()) {
      entries = explain::ToJson(explain::AggregateImportance(attributions, top));
    }
    return Ok({{"top", top},
               {"n_patients", attributions.size()},
               {"entries", std::move(entries)}});
  }
  if (id == "qa_ask") {
    if (stores.answerer == nullptr) loaded->RequireGuidelines();
    const std::string question = body["question"];
    const std::size_t k = body.value("k", 5);
    Json out = {{"question", question}, {"k", k}};
    if (body.contains("patient_id")) {
      PatientRow(*loaded, body["patient_id"]);
      out["patient_id"] = body["patient_id"];
    }
    out["answers"] = qa::ToJson(stores.answerer->Ask(question, k));
    return Ok(out);
  }
  if (id == "context_answer") {
    const auto kind = context::ParseKind(body["kind"].get<std::string>());
    const context::AnswerBundle bundle =
        context::Answer(*kind, body.value("patient_id", std::string()), stores,
                        body.value("question", std::string()));
    return Ok({{"bundle", context::ToJson(bundle)},
               {"text", context::Render(bundle, context::RenderFormat::kText)}});
  }
  throw Error(ErrorCode::kNotFound, "no handler for " + id, "");
}

}  // namespace ckdctx::service
