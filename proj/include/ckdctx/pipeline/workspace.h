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


#ifndef CKDCTX_PIPELINE_WORKSPACE_H_
#define CKDCTX_PIPELINE_WORKSPACE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "ckdctx/common/json_util.h"

namespace ckdctx::pipeline {

// Artifact name -> file contents.
using Artifacts = std::map<std::string, std::string>;

// Root pointer of a workspace. `sequence` 0 is the empty workspace.
struct Manifest {
  std::uint64_t sequence = 0;
  std::string snapshot;  // directory relative to the root
  std::map<std::string, std::string> artifacts;  // name -> content hash

  Json ToJson() const;
  static Manifest FromJson(const Json& json);
};

// Hex FNV-1a of the bytes; used as the artifact version.
std::string ContentHash(std::string_view bytes);

// The job that produces an artifact ("train" for model_MLP.json).
std::string ProducingJob(const std::string& artifact);

// Immutable view of one committed snapshot.
class Snapshot {
 public:
  Snapshot(std::filesystem::path root, Manifest manifest);

  const Manifest& manifest() const { return manifest_; }
  std::uint64_t sequence() const { return manifest_.sequence; }
  bool Has(const std::string& artifact) const;
  // Throws kDependency naming the artifact and its producing job; the
  // error path is the artifact name.
  std::string Read(const std::string& artifact) const;
  Json ReadJson(const std::string& artifact) const;

 private:
  std::filesystem::path root_;
  Manifest manifest_;
};

// Directory-per-snapshot store:
//   <root>/manifest.json
//   <root>/snapshots/000001/<artifact>
// A commit writes a complete new snapshot directory, then replaces the
// manifest by rename, so readers see either the old or the new snapshot.
class Workspace {
 public:
  explicit Workspace(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  Snapshot Current() const;
  // New snapshot = current artifacts overlaid with `updates`. Unchanged
  // files are hard-linked when the filesystem allows it.
  Snapshot Commit(const Artifacts& updates);

 private:
  std::filesystem::path root_;
  std::mutex commit_mutex_;
};

}  // namespace ckdctx::pipeline

#endif  // CKDCTX_PIPELINE_WORKSPACE_H_
