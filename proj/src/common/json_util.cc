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

#include "ckdctx/common/json_util.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ckdctx/common/error.h"

namespace ckdctx {

std::string DumpCanonical(const Json& value) {
  std::string out = value.dump(2);
  out.push_back('\n');
  return out;
}

Json ParseJson(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kValidation,
                std::string(what) + ": malformed JSON: " + e.what());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view data) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Json ReadJsonFile(const std::filesystem::path& path) {
  return ParseJson(ReadFile(path), path.string());
}

void WriteJsonFile(const std::filesystem::path& path, const Json& value) {
  WriteFileAtomic(path, DumpCanonical(value));
}

const Json& RequireField(const Json& object, std::string_view key,
                         const std::string& path) {
  if (!object.is_object()) {
    throw Error(ErrorCode::kValidation, "expected an object at " + path, path);
  }
  auto it = object.find(std::string(key));
  if (it == object.end()) {
    const std::string field_path = path + "/" + std::string(key);
    throw Error(ErrorCode::kValidation, "missing field " + field_path,
                field_path);
  }
  return *it;
}

double RequireNumber(const Json& object, std::string_view key,
                     const std::string& path) {
  const Json& v = RequireField(object, key, path);
  if (!v.is_number()) {
    const std::string field_path = path + "/" + std::string(key);
    throw Error(ErrorCode::kValidation, "expected a number at " + field_path,
                field_path);
  }
  return v.get<double>();
}

std::int64_t RequireInt(const Json& object, std::string_view key,
                        const std::string& path) {
  const Json& v = RequireField(object, key, path);
  if (!v.is_number_integer()) {
    const std::string field_path = path + "/" + std::string(key);
    throw Error(ErrorCode::kValidation, "expected an integer at " + field_path,
                field_path);
  }
  return v.get<std::int64_t>();
}

std::string RequireString(const Json& object, std::string_view key,
                          const std::string& path) {
  const Json& v = RequireField(object, key, path);
  if (!v.is_string()) {
    const std::string field_path = path + "/" + std::string(key);
    throw Error(ErrorCode::kValidation, "expected a string at " + field_path,
                field_path);
  }
  return v.get<std::string>();
}

const Json& RequireArray(const Json& object, std::string_view key,
                         const std::string& path) {
  const Json& v = RequireField(object, key, path);
  if (!v.is_array()) {
    const std::string field_path = path + "/" + std::string(key);
    throw Error(ErrorCode::kValidation, "expected an array at " + field_path,
                field_path);
  }
  return v;
}

void RejectUnknownFields(const Json& object,
                         std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool known = false;
    for (std::string_view name : allowed) {
      if (it.key() == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      const std::string field_path = path + "/" + it.key();
      throw Error(ErrorCode::kValidation, "unknown field " + field_path,
                  field_path);
    }
  }
}

std::string FormatDouble(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, end);
}

std::string FormatFixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace ckdctx
