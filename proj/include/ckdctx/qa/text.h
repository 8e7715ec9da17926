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

#ifndef CKDCTX_QA_TEXT_H_
#define CKDCTX_QA_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace ckdctx::qa {

bool IsStopword(std::string_view word);

// Lowercased alphanumeric runs with stopwords removed.
std::vector<std::string> Tokenize(std::string_view text);

}  // namespace ckdctx::qa

#endif  // CKDCTX_QA_TEXT_H_
