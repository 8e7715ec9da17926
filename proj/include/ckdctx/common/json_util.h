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

#ifndef CKDCTX_COMMON_JSON_UTIL_H_
#define CKDCTX_COMMON_JSON_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"

namespace ckdctx {

using Json = nlohmann::json;

// Canonical serialization: sorted keys, two-space indent, trailing newline.
// Every artifact goes through this so byte comparison is meaningful.
std::string DumpCanonical(const Json& value);

Json ParseJson(std::string_view text, std::string_view what);

std::string ReadFile(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

Json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const Json& value);

// Typed field access that throws kValidation naming the JSON path.
const Json& RequireField(const Json& object, std::string_view key,
                         const std::string& path);
double RequireNumber(const Json& object, std::string_view key,
                     const std::string& path);
std::int64_t RequireInt(const Json& object, std::string_view key,
                        const std::string& path);
std::string RequireString(const Json& object, std::string_view key,
                          const std::string& path);
const Json& RequireArray(const Json& object, std::string_view key,
                         const std::string& path);
// Rejects keys not in `allowed` (strict-mode readers).
void RejectUnknownFields(const Json& object,
                         std::initializer_list<std::string_view> allowed,
                         const std::string& path);

// Shortest round-trip decimal form of a double ("0.1", "10", "1e-12").
std::string FormatDouble(double value);
// Fixed-point with the given number of decimals ("0.83").
std::string FormatFixed(double value, int decimals);

}  // namespace ckdctx

#endif  // CKDCTX_COMMON_JSON_UTIL_H_
