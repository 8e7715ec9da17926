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

#ifndef CKDCTX_COMMON_ERROR_H_
#define CKDCTX_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ckdctx {

// Error categories shared by every module. The CLI maps them to exit codes
// and the service maps them to HTTP status codes.
enum class ErrorCode {
  kConfig,
  kInput,
  kShape,
  kSplit,
  kDegenerateLabel,
  kDivergence,
  kAucUndefined,
  kMapping,
  kRefused,
  kStructure,
  kValidation,
  kUnsupportedVersion,
  kQuery,
  kNotFound,
  kDependency,
  kRender,
  kConflict,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const { return code_; }
  // JSON path or field name the error refers to; empty when not applicable.
  const std::string& path() const { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace ckdctx

#endif  // CKDCTX_COMMON_ERROR_H_
