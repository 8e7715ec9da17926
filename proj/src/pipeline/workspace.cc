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


#include "ckdctx/pipeline/workspace.h"

#include <cstdio>
#include <system_error>

#include "ckdctx/common/error.h"
#include "ckdctx/common/rng.h"

namespace ckdctx::pipeline {
namespace {

namespace fs = std::filesystem;

constexpr const char* kManifestFile = "manifest.json";

std::string SnapshotName(std::uint64_t sequence) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshots/%06llu",
                static_cast<unsigned long long>(sequence));
  return buf;
}

bool ValidArtifactName(const std::string& name) {
  if (name.empty() || name[0] == '.') return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

Json Manifest::ToJson() const {
  return {{"format_version", 1},
          {"sequence", sequence},
          {"snapshot", snapshot},
          {"artifacts", artifacts}};
}

Manifest Manifest::FromJson(const Json& json) {
  const std::string root;
  RejectUnknownFields(json,
                      {"format_version", "sequence", "snapshot", "artifacts"},
                      root);
  if (RequireInt(json, "format_version", root) != 1) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "unsupported manifest format_version", "/format_version");
  }
  Manifest m;
  m.sequence = static_cast<std::uint64_t>(RequireInt(json, "sequence", root));
  m.snapshot = RequireString(json, "snapshot", root);
  const Json& artifacts = RequireField(json, "artifacts", root);
  for (const auto& [name, hash] : artifacts.items()) {
    if (!ValidArtifactName(name) || !hash.is_string()) {
      throw Error(ErrorCode::kValidation, "bad artifact entry",
                  "/artifacts/" + name);
    }
    m.artifacts[name] = hash.get<std::string>();
  }
  return m;
}

std::string ContentHash(std::string_view bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(StableHash(bytes)));
  return buf;
}

std::string ProducingJob(const std::string& artifact) {
  if (artifact == "claims.ndjson") return "generate-data";
  if (artifact == "cohort.json" || artifact == "features.json" ||
      artifact == "split.json") {
    return "cohort";
  }
  if (artifact.rfind("model_", 0) == 0 || artifact.rfind("metrics_", 0) == 0) {
    return "train";
  }
  if (artifact == "explanations.json" || artifact == "prototypes.json") {
    return "explain";
  }
  if (artifact.rfind("guidelines", 0) == 0) return "ingest";
  return "unknown";
}

Snapshot::Snapshot(fs::path root, Manifest manifest)
    : root_(std::move(root)), manifest_(std::move(manifest)) {}

bool Snapshot::Has(const std::string& artifact) const {
  return manifest_.artifacts.count(artifact) > 0;
}

std::string Snapshot::Read(const std::string& artifact) const {
  if (!Has(artifact)) {
    throw Error(ErrorCode::kDependency,
                "artifact " + artifact + " has not been built; run the " +
                    ProducingJob(artifact) + " job",
                artifact);
  }
  return ReadFile(root_ / manifest_.snapshot / artifact);
}

Json Snapshot::ReadJson(const std::string& artifact) const {
  return ParseJson(Read(artifact), artifact);
}

Workspace::Workspace(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "snapshots", ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create workspace " + root_.string() +
                                    ": " + ec.message());
  }
}

Snapshot Workspace::Current() const {
  const fs::path path = root_ / kManifestFile;
  if (!fs::exists(path)) return Snapshot(root_, Manifest{});
  return Snapshot(root_, Manifest::FromJson(ReadJsonFile(path)));
}

Snapshot Workspace::Commit(const Artifacts& updates) {
  std::lock_guard<std::mutex> lock(commit_mutex_);
  const Snapshot current = Current();
  Manifest next;
  next.sequence = current.sequence() + 1;
  next.snapshot = SnapshotName(next.sequence);
  const fs::path dir = root_ / next.snapshot;
  std::error_code ec;
  fs::remove_all(dir, ec);  // left over from an interrupted commit
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo,
                "cannot create " + dir.string() + ": " + ec.message());
  }
  for (const auto& [name, hash] : current.manifest().artifacts) {
    if (updates.count(name)) continue;
    const fs::path from = root_ / current.manifest().snapshot / name;
    fs::create_hard_link(from, dir / name, ec);
    if (ec) {
      ec.clear();
      fs::copy_file(from, dir / name, ec);
      if (ec) {
        throw Error(ErrorCode::kIo,
                    "cannot carry " + name + " forward: " + ec.message());
      }
    }
    next.artifacts[name] = hash;
  }
  for (const auto& [name, bytes] : updates) {
    if (!ValidArtifactName(name)) {
      throw Error(ErrorCode::kInput, "bad artifact name " + name, name);
    }
    WriteFileAtomic(dir / name, bytes);
    next.artifacts[name] = ContentHash(bytes);
  }
  WriteJsonFile(root_ / kManifestFile, next.ToJson());
  return Snapshot(root_, next);
}

}  // namespace ckdctx::pipeline
