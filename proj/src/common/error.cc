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

#include "ckdctx/common/error.h"

namespace ckdctx {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kInput: return "input_error";
    case ErrorCode::kShape: return "shape_error";
    case ErrorCode::kSplit: return "split_error";
    case ErrorCode::kDegenerateLabel: return "degenerate_label";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kAucUndefined: return "auc_undefined";
    case ErrorCode::kMapping: return "mapping_error";
    case ErrorCode::kRefused: return "refused";
    case ErrorCode::kStructure: return "structure_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kQuery: return "query_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDependency: return "dependency_error";
    case ErrorCode::kRender: return "render_error";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kIo: return "io_error";
  }
  return "error";
}

}  // namespace ckdctx
