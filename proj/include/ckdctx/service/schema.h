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


#ifndef CKDCTX_SERVICE_SCHEMA_H_
#define CKDCTX_SERVICE_SCHEMA_H_

#include <string>

#include "ckdctx/common/json_util.h"

namespace ckdctx::service {

// Checks `value` against the JSON Schema subset used by the request
// schemas: type, properties, required, additionalProperties: false, enum,
// minimum, minLength and items. Throws kValidation with the JSON pointer
// of the first violation.
void ValidateSchema(const Json& schema, const Json& value,
                    const std::string& path = "");

}  // namespace ckdctx::service

#endif  // CKDCTX_SERVICE_SCHEMA_H_
