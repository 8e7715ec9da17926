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

#ifndef CKDCTX_CONTEXT_ANSWER_H_
#define CKDCTX_CONTEXT_ANSWER_H_

#include <string>
#include <string_view>
#include <vector>

#include "ckdctx/context/bundle.h"
#include "ckdctx/context/routing.h"
#include "ckdctx/context/stores.h"

namespace ckdctx::context {

// Answers a named kind, or `free_text` when kind is FreeText. Throws
// kInput when a patient-specific kind has no patient_id, kNotFound for an
// unknown patient, and kDependency naming any store that is not loaded.
AnswerBundle Answer(QuestionKind kind, const std::string& patient_id,
                    const Stores& stores, std::string_view free_text = {});

// The patient's attribution, from the store or computed on demand.
explain::Attribution AttributionFor(const Stores& stores,
                                    const std::string& patient_id);

// Provenance entries that do not resolve against `stores`; empty when
// every part points at a live object.
std::vector<std::string> DanglingProvenance(const AnswerBundle& bundle,
                                            const Stores& stores);

}  // namespace ckdctx::context

#endif  // CKDCTX_CONTEXT_ANSWER_H_
