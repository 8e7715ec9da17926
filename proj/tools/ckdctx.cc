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


// Batch driver: one subcommand per pipeline operation, plus `serve` and
// `report`. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ckdctx/common/error.h"
#include "ckdctx/context/answer.h"
#include "ckdctx/context/bundle.h"
#include "ckdctx/guideline/document.h"
#include "ckdctx/pipeline/config.h"
#include "ckdctx/pipeline/loaded.h"
#include "ckdctx/pipeline/report.h"
#include "ckdctx/pipeline/stages.h"
#include "ckdctx/pipeline/workspace.h"
#include "ckdctx/qa/answerer.h"
#include "ckdctx/qa/numeric.h"
#include "ckdctx/risk/metrics.h"
#include "ckdctx/service/api.h"
#include "ckdctx/service/server.h"

namespace {

namespace fs = std::filesystem;
using namespace ckdctx;

struct Common {
  std::string config;
  std::string data_dir;
  std::optional<std::uint64_t> seed;
};

void AddCommon(CLI::App* sub, Common& c, bool with_seed) {
  sub->add_option("--config", c.config, "Pipeline config file (JSON)")
      ->required();
  sub->add_option("--data-dir", c.data_dir,
                  "Workspace directory [env CKDCTX_DATA_DIR, config data_dir]");
  if (with_seed) {
    sub->add_option("--seed", c.seed, "Master seed [config seed]");
  }
}

const char* Env(const char* name) {
  const char* value = std::getenv(name);
  return value != nullptr && *value != '\0' ? value : nullptr;
}

// flag > env > config file.
pipeline::PipelineConfig Resolve(const Common& c) {
  pipeline::PipelineConfig config = pipeline::PipelineConfig::Load(c.config);
  if (!c.data_dir.empty()) {
    config.data_dir = fs::absolute(c.data_dir);
  } else if (const char* env = Env("CKDCTX_DATA_DIR")) {
    config.data_dir = fs::absolute(env);
  }
  if (c.seed) config.seed = *c.seed;
  return config;
}

int Commit(const pipeline::PipelineConfig& config,
           const pipeline::Artifacts& artifacts) {
  pipeline::Workspace ws(config.data_dir);
  const pipeline::Snapshot s = ws.Commit(artifacts);
  std::cout << "snapshot " << s.sequence() << ":";
  for (const auto& [name, bytes] : artifacts) std::cout << " " << name;
  std::cout << "\n";
  return 0;
}

void PrintMetrics(const std::string& name, const std::string& json) {
  const risk::MetricsReport m = risk::MetricsFromJson(ParseJson(json, name));
  std::cout << name << ": precision " << FormatFixed(m.precision, 3)
            << ", recall " << FormatFixed(m.recall, 3) << ", AUC-ROC "
            << FormatFixed(m.auc_roc, 3) << ", AUC-PRC "
            << FormatFixed(m.auc_prc, 3) << ", Brier "
            << FormatFixed(m.brier, 3) << " (n = " << m.n << ")\n";
}

std::string KindsList() { return "LR or MLP"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CKD risk prediction contextualization pipeline", "ckdctx"};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate-data
  Common gen;
  auto* s_gen = app.add_subcommand("generate-data",
                                   "Generate synthetic claims (claims.ndjson)");
  AddCommon(s_gen, gen, true);
  s_gen->callback([&] {
    action = [&] {
      const auto config = Resolve(gen);
      return Commit(config, pipeline::RunGenerateData(config));
    };
  });

  // build-cohort
  Common coh;
  auto* s_coh = app.add_subcommand(
      "build-cohort", "Select the cohort and build features and the split");
  AddCommon(s_coh, coh, true);
  s_coh->callback([&] {
    action = [&] {
      const auto config = Resolve(coh);
      pipeline::Workspace ws(config.data_dir);
      return Commit(config, pipeline::RunBuildCohort(config, ws.Current()));
    };
  });

  // train
  Common tr;
  std::string train_kind;
  auto* s_tr = app.add_subcommand(
      "train", "Train one risk model and write its test metrics");
  AddCommon(s_tr, tr, true);
  s_tr->add_option("--kind", train_kind, "Model kind: " + KindsList())
      ->required();
  s_tr->callback([&] {
    action = [&] {
      const auto config = Resolve(tr);
      const risk::ModelKind kind = risk::ParseModelKind(train_kind);
      pipeline::Workspace ws(config.data_dir);
      const pipeline::Artifacts out =
          pipeline::RunTrain(config, ws.Current(), kind);
      Commit(config, out);
      PrintMetrics(pipeline::MetricsArtifact(kind),
                   out.at(pipeline::MetricsArtifact(kind)));
      return 0;
    };
  });

  // evaluate
  Common ev;
  std::string eval_kind;
  auto* s_ev = app.add_subcommand(
      "evaluate", "Recompute test metrics of a trained model");
  AddCommon(s_ev, ev, false);
  s_ev->add_option("--kind", eval_kind, "Model kind: " + KindsList())
      ->required();
  s_ev->callback([&] {
    action = [&] {
      const auto config = Resolve(ev);
      const risk::ModelKind kind = risk::ParseModelKind(eval_kind);
      pipeline::Workspace ws(config.data_dir);
      const pipeline::Artifacts out =
          pipeline::RunEvaluate(config, ws.Current(), kind);
      Commit(config, out);
      PrintMetrics(pipeline::MetricsArtifact(kind),
                   out.at(pipeline::MetricsArtifact(kind)));
      return 0;
    };
  });

  // explain
  Common ex;
  std::string explain_model;
  auto* s_ex = app.add_subcommand(
      "explain", "Attribute risk for the high-risk test pool");
  AddCommon(s_ex, ex, true);
  s_ex->add_option("--model", explain_model,
                   "Model to explain [config explain.model]");
  s_ex->callback([&] {
    action = [&] {
      auto config = Resolve(ex);
      if (!explain_model.empty()) {
        config.explain.model = risk::ParseModelKind(explain_model);
      }
      pipeline::Workspace ws(config.data_dir);
      return Commit(config, pipeline::RunExplain(config, ws.Current()));
    };
  });

  // prototypes
  Common pr;
  std::string proto_model;
  std::optional<std::size_t> proto_k;
  auto* s_pr = app.add_subcommand(
      "prototypes", "Select prototypical high-risk patients");
  AddCommon(s_pr, pr, false);
  s_pr->add_option("--model", proto_model,
                   "Model defining the pool [config explain.model]");
  s_pr->add_option("--k", proto_k, "Number of prototypes [config prototypes.k]")
      ->check(CLI::PositiveNumber);
  s_pr->callback([&] {
    action = [&] {
      auto config = Resolve(pr);
      if (!proto_model.empty()) {
        config.explain.model = risk::ParseModelKind(proto_model);
      }
      if (proto_k) config.prototypes.k = *proto_k;
      pipeline::Workspace ws(config.data_dir);
      return Commit(config, pipeline::RunPrototypes(config, ws.Current()));
    };
  });

  // ingest-guidelines
  Common in;
  std::string html_path;
  std::string parse_config_path;
  auto* s_in = app.add_subcommand("ingest-guidelines",
                                  "Parse guideline HTML into the store");
  AddCommon(s_in, in, false);
  s_in->add_option("--guideline-html", html_path,
                   "Guideline HTML file [config guideline_html]");
  s_in->add_option("--guideline-parse-config", parse_config_path,
                   "Parser config file [config guideline_parse_config]");
  s_in->callback([&] {
    action = [&] {
      auto config = Resolve(in);
      if (!html_path.empty()) config.guideline_html = fs::absolute(html_path);
      if (!parse_config_path.empty()) {
        config.guideline_parse_config = fs::absolute(parse_config_path);
      }
      const pipeline::Artifacts out = pipeline::RunIngest(config);
      Commit(config, out);
      const Json report =
          ParseJson(out.at(pipeline::kGuidelineReport), "report");
      std::cout << report["recommendations"].get<int>()
                << " recommendations in " << report["chapters"].get<int>()
                << " chapters; " << report["skipped"].size()
                << " nodes skipped\n";
      return 0;
    };
  });

  // ask
  Common ask;
  std::string question;
  std::size_t ask_k = 5;
  std::string ask_format = "text";
  auto* s_ask = app.add_subcommand("ask", "Ask the guideline store a question");
  AddCommon(s_ask, ask, false);
  s_ask->add_option("question", question, "Question text")->required();
  s_ask->add_option("--k", ask_k, "Number of answers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_ask->add_option("--format", ask_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  s_ask->callback([&] {
    action = [&] {
      const auto config = Resolve(ask);
      const pipeline::Workspace ws(config.data_dir);
      const guideline::GuidelineDoc doc = guideline::GuidelineDocFromJson(
          ws.Current().ReadJson(pipeline::kGuidelines));
      const qa::LexicalAnswerer answerer(guideline::ToPassages(doc));
      const auto answers = answerer.Ask(question, ask_k);
      if (ask_format == "json") {
        std::cout << DumpCanonical(qa::ToJson(answers));
        return 0;
      }
      for (std::size_t i = 0; i < answers.size(); ++i) {
        const qa::RankedAnswer& a = answers[i];
        const guideline::Recommendation* rec =
            doc.FindRecommendation(a.rec_id);
        std::cout << i + 1 << ". " << a.rec_id;
        if (rec != nullptr) {
          std::cout << " (Grade " << guideline::GradeName(rec->grade) << ")";
        }
        std::cout << "  score " << FormatFixed(a.total(), 3) << " = lexical "
                  << FormatFixed(a.lexical_score, 3) << " + numeric "
                  << FormatFixed(a.numeric_bonus, 3) << "\n   "
                  << a.answer_text << "\n";
        for (const qa::ConstraintMatch& m : a.matched_constraints) {
          std::cout << "   [" << qa::MatchDisplay(m.question, m.answer)
                    << "]\n";
        }
      }
      return 0;
    };
  });

  // context
  Common cx;
  std::string cx_kind;
  std::string cx_patient;
  std::string cx_question;
  std::string cx_format = "text";
  auto* s_cx = app.add_subcommand(
      "context", "Answer a question kind with a contextualized bundle");
  AddCommon(s_cx, cx, false);
  s_cx->add_option("--kind", cx_kind, "Q1, Q2, Q3, Q3a, Q4, Q5, Q6 or FreeText")
      ->required();
  s_cx->add_option("--patient-id", cx_patient,
                   "Patient for patient-specific kinds");
  s_cx->add_option("--question", cx_question, "Question text for FreeText");
  s_cx->add_option("--format", cx_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  s_cx->callback([&] {
    action = [&] {
      const auto config = Resolve(cx);
      const auto kind = context::ParseKind(cx_kind);
      if (!kind) {
        throw Error(ErrorCode::kInput, "unknown kind '" + cx_kind + "'",
                    "kind");
      }
      pipeline::Workspace ws(config.data_dir);
      const pipeline::LoadedStores loaded(config, ws.Current());
      const context::AnswerBundle bundle =
          context::Answer(*kind, cx_patient, loaded.stores(), cx_question);
      std::cout << context::Render(bundle,
                                   context::ParseRenderFormat(cx_format));
      return 0;
    };
  });

  // serve
  Common sv;
  std::optional<int> port;
  std::string host;
  std::optional<int> workers;
  std::string token;
  auto* s_sv = app.add_subcommand("serve", "Start the HTTP service");
  AddCommon(s_sv, sv, false);
  s_sv->add_option("--host", host, "Bind address [config service.host]");
  s_sv->add_option("--port", port,
                   "Port [env CKDCTX_PORT, config service.port]")
      ->check(CLI::Range(0, 65535));
  s_sv->add_option("--workers", workers,
                   "Job worker threads [config service.workers]")
      ->check(CLI::PositiveNumber);
  s_sv->add_option("--token", token,
                   "Bearer token required on every request "
                   "[config service.token]");
  s_sv->callback([&] {
    action = [&] {
      auto config = Resolve(sv);
      if (port) {
        config.service.port = *port;
      } else if (const char* env = Env("CKDCTX_PORT")) {
        try {
          config.service.port = std::stoi(env);
        } catch (const std::exception&) {
          throw Error(ErrorCode::kConfig, "CKDCTX_PORT is not a number",
                      "CKDCTX_PORT");
        }
      }
      if (!host.empty()) config.service.host = host;
      if (workers) config.service.workers = *workers;
      if (!token.empty()) config.service.token = token;
      service::Service svc(config);
      service::HttpServer server(svc);
      std::cerr << "serving " << config.data_dir.string() << " on "
                << config.service.host << ":" << config.service.port << "\n";
      server.Run(config.service.host, config.service.port);
      return 0;
    };
  });

  // report
  Common rp;
  std::vector<std::string> sections;
  std::string rp_format = "markdown";
  std::string rp_patient;
  std::string rp_output;
  std::size_t rp_top = 20;
  auto* s_rp = app.add_subcommand(
      "report", "Render metrics, prototypes, importances and question flow");
  AddCommon(s_rp, rp, false);
  s_rp->add_option("--sections", sections,
                   "Comma list of metrics, prototypes, aggregate_importance, "
                   "question_flow [all]")
      ->delimiter(',');
  s_rp->add_option("--format", rp_format, "markdown or json")
      ->check(CLI::IsMember({"markdown", "json"}))
      ->capture_default_str();
  s_rp->add_option("--patient-id", rp_patient,
                   "Patient for the question flow [highest-risk explained]");
  s_rp->add_option("--top", rp_top, "Number of aggregated importances")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s_rp->add_option("--output", rp_output, "Write to this file [stdout]");
  s_rp->callback([&] {
    action = [&] {
      const auto config = Resolve(rp);
      pipeline::ReportSpec spec;
      if (!sections.empty()) {
        spec.sections.clear();
        for (const std::string& s : sections) {
          spec.sections.push_back(pipeline::ParseReportSection(s));
        }
      }
      spec.format = pipeline::ParseReportFormat(rp_format);
      spec.patient_id = rp_patient;
      spec.top = rp_top;
      pipeline::Workspace ws(config.data_dir);
      const pipeline::LoadedStores loaded(config, ws.Current());
      const std::string text = pipeline::RenderReport(loaded, spec);
      if (rp_output.empty()) {
        std::cout << text;
      } else {
        WriteFileAtomic(rp_output, text);
      }
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const Error& e) {
    std::cerr << "error: " << ErrorCodeName(e.code()) << ": " << e.what();
    if (!e.path().empty()) std::cerr << " [" << e.path() << "]";
    std::cerr << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
