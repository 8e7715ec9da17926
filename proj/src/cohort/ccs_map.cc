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

#include "ckdctx/cohort/ccs_map.h"

#include <algorithm>

#include "ckdctx/common/error.h"

namespace ckdctx::cohort {

CcsMap CcsMap::FromJson(const Json& json) {
  if (!json.is_object() || json.empty()) {
    throw Error(ErrorCode::kMapping, "CCS map must be a non-empty object");
  }
  CcsMap map;
  for (auto it = json.begin(); it != json.end(); ++it) {
    const std::string path = "/" + it.key();
    const Json& value = it.value();
    if (!value.is_object() || !value.contains("ccs") ||
        !value.contains("level1")) {
      throw Error(ErrorCode::kMapping,
                  "pattern '" + it.key() + "' lacks a ccs code or level1 label",
                  path);
    }
    RejectUnknownFields(value, {"ccs", "level1", "name"}, path);
    const int ccs = static_cast<int>(RequireInt(value, "ccs", path));
    const std::string level1 = RequireString(value, "level1", path);
    if (level1.empty()) {
      throw Error(ErrorCode::kMapping, "empty level1 label", path + "/level1");
    }
    auto [pos, inserted] = map.level1_.emplace(ccs, level1);
    if (!inserted && pos->second != level1) {
      throw Error(ErrorCode::kMapping,
                  "CCS " + std::to_string(ccs) +
                      " has conflicting level1 labels '" + pos->second +
                      "' and '" + level1 + "'",
                  path + "/level1");
    }
    if (value.contains("name")) {
      const std::string name = RequireString(value, "name", path);
      auto [npos, ninserted] = map.names_.emplace(ccs, name);
      if (!ninserted && npos->second != name) {
        throw Error(ErrorCode::kMapping,
                    "CCS " + std::to_string(ccs) + " has conflicting names",
                    path + "/name");
      }
    }
    map.entries_.push_back({CodePattern(it.key()), ccs});
  }
  // nlohmann objects iterate in key order already; keep the invariant
  // explicit for maps built elsewhere.
  std::sort(map.entries_.begin(), map.entries_.end(),
            [](const Entry& a, const Entry& b) {
              return a.pattern.text() < b.pattern.text();
            });
  return map;
}

CcsMap CcsMap::Load(const std::string& path) {
  return FromJson(ReadJsonFile(path));
}

Json CcsMap::ToJson() const {
  Json out = Json::object();
  for (const Entry& e : entries_) {
    Json value = {{"ccs", e.ccs}, {"level1", level1_.at(e.ccs)}};
    auto name = names_.find(e.ccs);
    if (name != names_.end()) value["name"] = name->second;
    out[e.pattern.text()] = std::move(value);
  }
  return out;
}

std::optional<int> CcsMap::Lookup(std::string_view code) const {
  const Entry* best = nullptr;
  for (const Entry& e : entries_) {
    if (!e.pattern.Matches(code)) continue;
    if (best == nullptr ||
        e.pattern.Specificity() > best->pattern.Specificity()) {
      best = &e;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->ccs;
}

int CcsMap::Resolve(std::string_view code) const {
  auto ccs = Lookup(code);
  if (!ccs) {
    throw Error(ErrorCode::kMapping,
                "diagnosis code '" + std::string(code) +
                    "' has no CCS mapping",
                std::string(code));
  }
  return *ccs;
}

const std::string& CcsMap::Level1(int ccs) const {
  auto it = level1_.find(ccs);
  if (it == level1_.end()) {
    throw Error(ErrorCode::kMapping,
                "unknown CCS code " + std::to_string(ccs));
  }
  return it->second;
}

std::string CcsMap::Name(int ccs) const {
  auto it = names_.find(ccs);
  return it == names_.end() ? "CCS " + std::to_string(ccs) : it->second;
}

std::vector<int> CcsMap::CcsCodes() const {
  std::vector<int> codes;
  codes.reserve(level1_.size());
  for (const auto& [ccs, label] : level1_) codes.push_back(ccs);
  return codes;
}

std::vector<CodePattern> CcsMap::PatternsFor(int ccs) const {
  std::vector<CodePattern> out;
  for (const Entry& e : entries_) {
    if (e.ccs == ccs) out.push_back(e.pattern);
  }
  return out;
}

}  // namespace ckdctx::cohort
