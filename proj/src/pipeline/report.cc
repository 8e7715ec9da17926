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


#include "ckdctx/pipeline/report.h"

#include <algorithm>

#include "ckdctx/common/error.h"
#include "ckdctx/context/answer.h"
#include "ckdctx/explain/aggregate.h"
#include "ckdctx/pipeline/stages.h"

namespace ckdctx::pipeline {
namespace {

constexpr ReportSection kAllSections[] = {
    ReportSection::kMetrics, ReportSection::kPrototypes,
    ReportSection::kAggregateImportance, ReportSection::kQuestionFlow};

std::string Cell(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

const risk::MetricsReport& RequireMetrics(const LoadedStores& loaded,
                                          risk::ModelKind kind) {
  const risk::MetricsReport* m = loaded.metrics(kind);
  if (m == nullptr) {
    const std::string name(risk::ModelKindName(kind));
    throw Error(ErrorCode::kDependency,
                "model " + name + " has not been trained; run train --kind " +
                    name,
                MetricsArtifact(kind));
  }
  return *m;
}

std::vector<explain::ImportanceEntry> Aggregate(const LoadedStores& loaded,
                                                std::size_t top) {
  std::vector<explain::Attribution> attributions;
  for (const auto& [id, a] : loaded.RequireExplanations().by_patient) {
    attributions.push_back(a);
  }
  if (attributions.empty()) return {};
  return explain::AggregateImportance(attributions, top);
}

std::vector<context::AnswerBundle> QuestionFlow(const LoadedStores& loaded,
                                                const std::string& patient) {
  std::vector<context::AnswerBundle> out;
  for (context::QuestionKind kind : context::NamedKinds()) {
    out.push_back(context::Answer(
        kind, context::NeedsPatient(kind) ? patient : "", loaded.stores()));
  }
  return out;
}

std::string SummarizeAnswer(const context::AnswerBundle& bundle) {
  const bool templated =
      std::any_of(bundle.parts().begin(), bundle.parts().end(),
                  [](const context::AnswerPart& p) {
                    return p.kind == context::PartKind::kTemplatedText;
                  });
  std::vector<std::string> pieces;
  for (const context::AnswerPart& part : bundle.parts()) {
    const Json& p = part.payload;
    switch (part.kind) {
      case context::PartKind::kRiskScore:
        if (!templated) {
          pieces.push_back("CKD risk " + p.value("display", std::string()));
        }
        break;
      case context::PartKind::kFeatureImportance: {
        std::string names;
        const Json entries = p.value("entries", Json::array());
        for (std::size_t i = 0; i < entries.size() && i < 5; ++i) {
          if (!names.empty()) names += ", ";
          names += entries[i].value("feature", std::string());
        }
        pieces.push_back("Top features: " + names);
        break;
      }
      case context::PartKind::kPrototypeSummary:
        pieces.push_back("Prototype summary, n = " +
                         std::to_string(p.value("n", 0)));
        break;
      case context::PartKind::kGuidelineText:
        if (p.contains("rec_id")) {
          pieces.push_back(p.value("text", std::string()) + " (Grade " +
                           p.value("grade", std::string()) + ", " +
                           p.value("rec_id", std::string()) + ")");
        } else if (!templated) {
          pieces.push_back(p.value("section", std::string()) + ": " +
                           p.value("text", std::string()));
        }
        break;
      case context::PartKind::kCohortStat:
        break;  // rendered through the templated answer
      case context::PartKind::kTemplatedText:
        pieces.push_back(p.value("text", std::string()));
        break;
    }
  }
  std::string out;
  for (const std::string& piece : pieces) {
    if (!out.empty()) out += "<br>";
    out += Cell(piece);
  }
  return out;
}

std::string AnnotationCell(const context::QuestionAnnotation& a) {
  return "Source: " + std::string(context::SourceName(a.source)) +
         ", Relevance: " + std::string(context::RelevanceName(a.relevance)) +
         ", Contextualization: " + context::DimensionsText(a.dimensions);
}

}  // namespace

std::string_view ReportSectionName(ReportSection section) {
  switch (section) {
    case ReportSection::kMetrics:
      return "metrics";
    case ReportSection::kPrototypes:
      return "prototypes";
    case ReportSection::kAggregateImportance:
      return "aggregate_importance";
    case ReportSection::kQuestionFlow:
      return "question_flow";
  }
  return "";
}

ReportSection ParseReportSection(std::string_view name) {
  for (ReportSection s : kAllSections) {
    if (ReportSectionName(s) == name) return s;
  }
  throw Error(ErrorCode::kConfig,
              "unknown report section '" + std::string(name) + "'",
              "sections");
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "markdown") return ReportFormat::kMarkdown;
  if (name == "json") return ReportFormat::kJson;
  throw Error(ErrorCode::kConfig,
              "unknown report format '" + std::string(name) + "'", "format");
}

std::string RenderReport(const LoadedStores& loaded, const ReportSpec& spec) {
  if (spec.sections.empty()) {
    throw Error(ErrorCode::kConfig, "report needs at least one section",
                "sections");
  }
  auto wanted = [&](ReportSection s) {
    return std::find(spec.sections.begin(), spec.sections.end(), s) !=
           spec.sections.end();
  };
  const bool markdown = spec.format == ReportFormat::kMarkdown;
  std::string md = "# CKD risk contextualization report\n";
  Json js = {{"format_version", 1}, {"sections", Json::object()}};

  if (wanted(ReportSection::kMetrics)) {
    md += "\n## Risk model metrics (test split)\n\n"
          "| Method | Precision | Recall | AUC-ROC | AUC-PRC | Brier |\n"
          "|---|---|---|---|---|---|\n";
    Json rows = Json::array();
    for (risk::ModelKind kind : loaded.config().report_models) {
      const risk::MetricsReport& m = RequireMetrics(loaded, kind);
      const std::string name(risk::ModelKindName(kind));
      md += "| " + name + " | " + FormatFixed(m.precision, 3) + " | " +
            FormatFixed(m.recall, 3) + " | " + FormatFixed(m.auc_roc, 3) +
            " | " + FormatFixed(m.auc_prc, 3) + " | " +
            FormatFixed(m.brier, 3) + " |\n";
      Json row = risk::ToJson(m);
      row["model"] = name;
      rows.push_back(std::move(row));
    }
    js["sections"]["metrics"] = std::move(rows);
  }

  if (wanted(ReportSection::kPrototypes)) {
    const context::PrototypeStore& protos = loaded.RequirePrototypes();
    const explain::PrototypeSummary& s = protos.summary;
    md += "\n## Prototypical high-risk patients\n\n"
          "| Feature | Count (%) |\n|---|---|\n"
          "| n | " + std::to_string(s.n) + " |\n";
    for (const explain::SummaryRow& row : s.rows) {
      const std::string label = s.IsHighPrevalence(row)
                                    ? "**" + Cell(row.label) + "**"
                                    : Cell(row.label);
      md += "| " + label + ", n (%) | " + s.FormatCount(row) + " |\n";
    }
    Json summary = explain::ToJson(s);
    summary["patient_ids"] = protos.patient_ids;
    js["sections"]["prototypes"] = std::move(summary);
  }

  if (wanted(ReportSection::kAggregateImportance)) {
    const auto ranking = Aggregate(loaded, spec.top);
    md += "\n## Top " + std::to_string(spec.top) +
          " aggregated feature importances\n\n"
          "| Rank | Feature | Mean abs phi |\n|---|---|---|\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
      md += "| " + std::to_string(i + 1) + " | " + Cell(ranking[i].feature) +
            " | " + FormatFixed(ranking[i].mean_abs_phi, 4) + " |\n";
    }
    js["sections"]["aggregate_importance"] = explain::ToJson(ranking);
  }

  if (wanted(ReportSection::kQuestionFlow)) {
    const std::string patient =
        spec.patient_id.empty() ? loaded.DefaultPatient() : spec.patient_id;
    const auto bundles = QuestionFlow(loaded, patient);
    md += "\n## Question flow\n\nPatient: " + patient +
          "\n\n| Question | Annotation | Answer |\n|---|---|---|\n";
    Json answers = Json::array();
    for (const context::AnswerBundle& b : bundles) {
      md += "| " + std::string(context::KindLabel(b.kind())) + ". " +
            Cell(b.question()) + " | " + AnnotationCell(b.annotation()) +
            " | " + SummarizeAnswer(b) + " |\n";
      answers.push_back(context::ToJson(b));
    }
    js["sections"]["question_flow"] = {{"patient_id", patient},
                                       {"answers", std::move(answers)}};
  }
  return markdown ? md : DumpCanonical(js);
}

}  // namespace ckdctx::pipeline
