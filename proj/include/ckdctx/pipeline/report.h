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


#ifndef CKDCTX_PIPELINE_REPORT_H_
#define CKDCTX_PIPELINE_REPORT_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/pipeline/loaded.h"

namespace ckdctx::pipeline {

enum class ReportSection {
  kMetrics,
  kPrototypes,
  kAggregateImportance,
  kQuestionFlow,
};
enum class ReportFormat { kMarkdown, kJson };

std::string_view ReportSectionName(ReportSection section);
// "metrics", "prototypes", "aggregate_importance", "question_flow".
ReportSection ParseReportSection(std::string_view name);
ReportFormat ParseReportFormat(std::string_view name);

struct ReportSpec {
  std::vector<ReportSection> sections = {
      ReportSection::kMetrics, ReportSection::kPrototypes,
      ReportSection::kAggregateImportance, ReportSection::kQuestionFlow};
  ReportFormat format = ReportFormat::kMarkdown;
  std::string patient_id;  // empty: LoadedStores::DefaultPatient()
  std::size_t top = 20;
};

// Sections are emitted in the enum order whatever order they were listed
// in. Throws kConfig for an empty section list and kDependency naming the
// first missing store.
std::string RenderReport(const LoadedStores& loaded, const ReportSpec& spec);

}  // namespace ckdctx::pipeline

#endif  // CKDCTX_PIPELINE_REPORT_H_
