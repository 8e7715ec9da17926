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

#ifndef CKDCTX_COHORT_CCS_MAP_H_
#define CKDCTX_COHORT_CCS_MAP_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/cohort/icd.h"
#include "ckdctx/common/json_util.h"

namespace ckdctx::cohort {

// ICD pattern -> CCS category crosswalk with Level-1 group labels.
//
// File format: {"<pattern>": {"ccs": <int>, "level1": "<label>",
//                             "name": "<optional category name>"}, ...}
class CcsMap {
 public:
  struct Entry {
    CodePattern pattern;
    int ccs = 0;
  };

  static CcsMap FromJson(const Json& json);
  static CcsMap Load(const std::string& path);
  Json ToJson() const;

  // Most specific matching pattern wins; ties go to the lexicographically
  // smaller pattern text.
  std::optional<int> Lookup(std::string_view code) const;
  // Like Lookup but throws kMapping naming the code.
  int Resolve(std::string_view code) const;

  const std::string& Level1(int ccs) const;
  std::string Name(int ccs) const;
  std::vector<int> CcsCodes() const;
  const std::vector<Entry>& entries() const { return entries_; }
  // Patterns that map to `ccs`, sorted by text.
  std::vector<CodePattern> PatternsFor(int ccs) const;

 private:
  std::vector<Entry> entries_;  // sorted by pattern text
  std::map<int, std::string> level1_;
  std::map<int, std::string> names_;
};

}  // namespace ckdctx::cohort

#endif  // CKDCTX_COHORT_CCS_MAP_H_
