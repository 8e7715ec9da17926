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


#include "ckdctx/service/schema.h"

#include "ckdctx/common/error.h"

namespace ckdctx::service {
namespace {

bool HasType(const Json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer();
  if (type == "null") return value.is_null();
  return false;
}

[[noreturn]] void Fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::kValidation,
              (path.empty() ? std::string("body") : path) + ": " + message,
              path);
}

}  // namespace

void ValidateSchema(const Json& schema, const Json& value,
                    const std::string& path) {
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    if (!HasType(value, type)) Fail(path, "expected " + type);
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const Json& option : schema["enum"]) found = found || option == value;
    if (!found) Fail(path, "value " + value.dump() + " is not allowed");
  }
  if (schema.contains("minimum") && value.is_number() &&
      value.get<double>() < schema["minimum"].get<double>()) {
    Fail(path, "must be at least " + schema["minimum"].dump());
  }
  if (schema.contains("minLength") && value.is_string() &&
      value.get<std::string>().size() <
          schema["minLength"].get<std::size_t>()) {
    Fail(path, "must not be empty");
  }
  if (value.is_object()) {
    const Json properties = schema.value("properties", Json::object());
    for (const Json& key : schema.value("required", Json::array())) {
      if (!value.contains(key.get<std::string>())) {
        Fail(path + "/" + key.get<std::string>(), "required");
      }
    }
    for (const auto& [key, child] : value.items()) {
      if (properties.contains(key)) {
        ValidateSchema(properties[key], child, path + "/" + key);
      } else if (!schema.value("additionalProperties", true)) {
        Fail(path + "/" + key, "unknown field");
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      ValidateSchema(schema["items"], value[i], path + "/" + std::to_string(i));
    }
  }
}

}  // namespace ckdctx::service
