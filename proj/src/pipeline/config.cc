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


#include "ckdctx/pipeline/config.h"

#include "ckdctx/common/error.h"

namespace ckdctx::pipeline {
namespace {

namespace fs = std::filesystem;

fs::path Resolve(const fs::path& base, const std::string& text) {
  const fs::path p(text);
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

void RejectStageSeed(const Json& json, const std::string& path) {
  if (json.is_object() && json.contains("seed")) {
    throw Error(ErrorCode::kConfig,
                "stage seeds are derived from the top-level seed",
                path + "/seed");
  }
}

}  // namespace

cohort::SynthConfig PipelineConfig::Synth() const {
  cohort::SynthConfig c = synth;
  c.seed = seed;
  if (default_planted_weights) {
    c.planted_weights = cohort::DefaultPlantedWeights(c.n_ccs_features, seed);
  }
  return c;
}

risk::TrainConfig PipelineConfig::Train(risk::ModelKind kind) const {
  risk::TrainConfig c;
  if (auto it = train.find(kind); it != train.end()) c = it->second;
  c.kind = kind;
  if (kind == risk::ModelKind::kLR) {
    c.hidden_sizes.clear();
    c.grid_hidden_sizes.clear();
  }
  c.seed = seed;
  return c;
}

explain::ExplainOptions PipelineConfig::Explain() const {
  explain::ExplainOptions o = explain.options;
  o.seed = seed;
  return o;
}

PipelineConfig PipelineConfig::FromJson(const Json& json,
                                        const fs::path& base_dir) {
  if (!json.is_object()) {
    throw Error(ErrorCode::kConfig, "config must be a JSON object", "");
  }
  const std::string root;
  RejectUnknownFields(
      json,
      {"format_version", "seed", "data_dir", "ccs_map", "templates",
       "guideline_html", "guideline_parse_config", "labs", "synth", "cohort",
       "features", "split", "train", "explain", "prototypes", "context",
       "service", "report_models"},
      root);
  if (json.contains("format_version") &&
      RequireInt(json, "format_version", root) != 1) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported config format_version", "/format_version");
  }
  PipelineConfig c;
  if (json.contains("seed")) {
    const Json& seed = json["seed"];
    if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
      throw Error(ErrorCode::kConfig, "seed must be an unsigned integer",
                  "/seed");
    }
    c.seed = seed.get<std::uint64_t>();
  }
  auto path_field = [&](const char* key, fs::path& out) {
    if (json.contains(key)) out = RequireString(json, key, root);
    out = Resolve(base_dir, out.string());
  };
  path_field("data_dir", c.data_dir);
  path_field("ccs_map", c.ccs_map);
  path_field("templates", c.templates);
  path_field("guideline_html", c.guideline_html);
  path_field("guideline_parse_config", c.guideline_parse_config);
  path_field("labs", c.labs);

  Json synth = json.value("synth", Json::object());
  RejectStageSeed(synth, "/synth");
  c.default_planted_weights = !synth.contains("planted_weights");
  c.synth = cohort::SynthConfigFromJson(synth);
  c.cohort = cohort::CohortConfigFromJson(json.value("cohort", Json()));
  c.features = cohort::FeatureConfigFromJson(json.value("features", Json()));

  if (json.contains("split")) {
    const Json& s = json["split"];
    RejectUnknownFields(s, {"train", "validation", "test"}, "/split");
    c.split = {RequireNumber(s, "train", "/split"),
               RequireNumber(s, "validation", "/split"),
               RequireNumber(s, "test", "/split")};
  }
  if (json.contains("train")) {
    const Json& t = json["train"];
    if (!t.is_object()) {
      throw Error(ErrorCode::kConfig, "train must map model kind to config",
                  "/train");
    }
    for (const auto& [name, body] : t.items()) {
      const risk::ModelKind kind = risk::ParseModelKind(name);
      RejectStageSeed(body, "/train/" + name);
      if (body.is_object() && body.contains("kind")) {
        throw Error(ErrorCode::kConfig, "kind is given by the key",
                    "/train/" + name + "/kind");
      }
      c.train[kind] = risk::TrainConfigFromJson(body);
    }
  }
  if (json.contains("explain")) {
    const Json& e = json["explain"];
    const std::string path = "/explain";
    RejectUnknownFields(e,
                        {"model", "exact_cap", "n_samples",
                         "high_risk_threshold", "max_patients"},
                        path);
    if (e.contains("model")) {
      c.explain.model = risk::ParseModelKind(RequireString(e, "model", path));
    }
    Json options = Json::object();
    for (const char* key : {"exact_cap", "n_samples"}) {
      if (e.contains(key)) options[key] = e[key];
    }
    c.explain.options = explain::ExplainOptionsFromJson(options);
    if (e.contains("high_risk_threshold")) {
      c.explain.high_risk_threshold =
          RequireNumber(e, "high_risk_threshold", path);
    }
    if (e.contains("max_patients")) {
      const auto n = RequireInt(e, "max_patients", path);
      if (n < 1) {
        throw Error(ErrorCode::kConfig, "max_patients must be positive",
                    path + "/max_patients");
      }
      c.explain.max_patients = static_cast<std::size_t>(n);
    }
  }
  if (json.contains("prototypes")) {
    const Json& p = json["prototypes"];
    const std::string path = "/prototypes";
    RejectUnknownFields(p, {"k", "high_prevalence_percent"}, path);
    if (p.contains("k")) {
      const auto k = RequireInt(p, "k", path);
      if (k < 1) {
        throw Error(ErrorCode::kConfig, "k must be positive", path + "/k");
      }
      c.prototypes.k = static_cast<std::size_t>(k);
    }
    if (p.contains("high_prevalence_percent")) {
      c.prototypes.high_prevalence_percent =
          static_cast<int>(RequireInt(p, "high_prevalence_percent", path));
    }
  }
  if (json.contains("context")) {
    c.context = context::ContextOptions::FromJson(json["context"]);
  }
  if (json.contains("service")) {
    const Json& s = json["service"];
    const std::string path = "/service";
    RejectUnknownFields(s, {"host", "port", "workers", "token"}, path);
    if (s.contains("host")) c.service.host = RequireString(s, "host", path);
    if (s.contains("port")) {
      c.service.port = static_cast<int>(RequireInt(s, "port", path));
    }
    if (s.contains("workers")) {
      c.service.workers = static_cast<int>(RequireInt(s, "workers", path));
    }
    if (s.contains("token")) c.service.token = RequireString(s, "token", path);
    if (c.service.port < 0 || c.service.port > 65535) {
      throw Error(ErrorCode::kConfig, "port out of range", path + "/port");
    }
    if (c.service.workers < 1) {
      throw Error(ErrorCode::kConfig, "workers must be positive",
                  path + "/workers");
    }
  }
  if (json.contains("report_models")) {
    c.report_models.clear();
    for (const Json& k : RequireArray(json, "report_models", root)) {
      if (!k.is_string()) {
        throw Error(ErrorCode::kConfig, "model kinds must be strings",
                    "/report_models");
      }
      c.report_models.push_back(risk::ParseModelKind(k.get<std::string>()));
    }
  }
  return c;
}

PipelineConfig PipelineConfig::Load(const fs::path& path) {
  return FromJson(ParseJson(ReadFile(path), path.string()),
                  fs::absolute(path).parent_path());
}

Json PipelineConfig::ToJson() const {
  Json train_json = Json::object();
  for (const auto& [kind, config] : train) {
    Json t = risk::ToJson(config);
    t.erase("kind");
    t.erase("seed");
    train_json[std::string(risk::ModelKindName(kind))] = std::move(t);
  }
  Json synth_json = cohort::ToJson(synth);
  synth_json.erase("seed");
  if (default_planted_weights) synth_json.erase("planted_weights");
  Json models = Json::array();
  for (risk::ModelKind k : report_models) {
    models.push_back(std::string(risk::ModelKindName(k)));
  }
  return {
      {"format_version", 1},
      {"seed", seed},
      {"data_dir", data_dir.string()},
      {"ccs_map", ccs_map.string()},
      {"templates", templates.string()},
      {"guideline_html", guideline_html.string()},
      {"guideline_parse_config", guideline_parse_config.string()},
      {"labs", labs.string()},
      {"synth", std::move(synth_json)},
      {"cohort", cohort::ToJson(cohort)},
      {"features", cohort::ToJson(features)},
      {"split",
       {{"train", split.train},
        {"validation", split.validation},
        {"test", split.test}}},
      {"train", std::move(train_json)},
      {"explain",
       {{"model", std::string(risk::ModelKindName(explain.model))},
        {"exact_cap", explain.options.exact_cap},
        {"n_samples", explain.options.n_samples},
        {"high_risk_threshold", explain.high_risk_threshold},
        {"max_patients", explain.max_patients}}},
      {"prototypes",
       {{"k", prototypes.k},
        {"high_prevalence_percent", prototypes.high_prevalence_percent}}},
      {"context", context.ToJson()},
      {"service",
       {{"host", service.host},
        {"port", service.port},
        {"workers", service.workers},
        {"token", service.token}}},
      {"report_models", std::move(models)},
  };
}

}  // namespace ckdctx::pipeline
