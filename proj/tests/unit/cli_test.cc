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


#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "ckdctx/common/json_util.h"
#include "gtest/gtest.h"

namespace ckdctx {
namespace {

namespace fs = std::filesystem;

const fs::path kData = CKDCTX_DATA_DIR;

struct CliRun {
  int status = -1;
  std::string out;  // stdout and stderr
};

CliRun Cli(const std::string& args, const std::string& env = "") {
  const std::string command =
      env + " " + std::string(CKDCTX_CLI) + " " + args + " 2>&1";
  CliRun run;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return run;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    run.out.append(buf.data(), n);
  }
  const int raw = pclose(pipe);
  run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return run;
}

// A small config with absolute resource paths, written next to a fresh
// workspace directory.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            ("ckdctx_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    const Json config = {
        {"seed", 5},
        {"data_dir", "ws"},
        {"ccs_map", (kData / "ccs_map.json").string()},
        {"templates", (kData / "templates.json").string()},
        {"guideline_html", (kData / "guidelines/ada_fixture.html").string()},
        {"guideline_parse_config",
         (kData / "guidelines/parse_config.json").string()},
        {"synth", {{"n_patients", 400}, {"n_ccs_features", 10}}},
        {"train",
         {{"LR", {{"epochs", 3}}},
          {"MLP", {{"epochs", 3}, {"hidden_sizes", {4}}}}}},
        {"explain", {{"n_samples", 100}, {"max_patients", 5}}},
        {"prototypes", {{"k", 4}}},
    };
    WriteJsonFile(root_ / "config.json", config);
    flags_ = " --config " + (root_ / "config.json").string();
  }

  fs::path root_;
  std::string flags_;
};

TEST_F(CliTest, MissingFlagIsUsageError) {
  CliRun r = Cli("train" + flags_);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("--kind"), std::string::npos);
  r = Cli("train --kind MLP");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("--config"), std::string::npos);
  EXPECT_EQ(Cli("").status, 2);
  EXPECT_EQ(Cli("frobnicate").status, 2);
  EXPECT_EQ(Cli("report --format pdf" + flags_).status, 2);
  EXPECT_EQ(Cli("--help").status, 0);
}

TEST_F(CliTest, DomainErrorsExitOne) {
  CliRun r = Cli("report --sections metrics" + flags_);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("model LR"), std::string::npos);
  r = Cli("train --kind SVM" + flags_);
  EXPECT_EQ(r.status, 1);
  r = Cli("build-cohort" + flags_);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("claims.ndjson"), std::string::npos);
  r = Cli("serve" + flags_, "CKDCTX_PORT=abc");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("CKDCTX_PORT"), std::string::npos);
}

TEST_F(CliTest, TrainTwiceGivesIdenticalModels) {
  ASSERT_EQ(Cli("generate-data" + flags_).status, 0);
  ASSERT_EQ(Cli("build-cohort" + flags_).status, 0);
  ASSERT_EQ(Cli("train --kind MLP --seed 7" + flags_).status, 0);
  const Json first = ReadJsonFile(root_ / "ws/manifest.json");
  ASSERT_EQ(Cli("train --kind MLP --seed 7" + flags_).status, 0);
  const Json second = ReadJsonFile(root_ / "ws/manifest.json");
  EXPECT_EQ(first["artifacts"]["model_MLP.json"],
            second["artifacts"]["model_MLP.json"]);
  EXPECT_EQ(ReadFile(root_ / "ws" / first["snapshot"].get<std::string>() /
                     "model_MLP.json"),
            ReadFile(root_ / "ws" / second["snapshot"].get<std::string>() /
                     "model_MLP.json"));
  ASSERT_EQ(Cli("train --kind MLP --seed 8" + flags_).status, 0);
  EXPECT_NE(ReadJsonFile(root_ / "ws/manifest.json")["artifacts"]
                        ["model_MLP.json"],
            first["artifacts"]["model_MLP.json"]);
}

TEST_F(CliTest, AskPrintsTheInsulinRecommendation) {
  ASSERT_EQ(Cli("ingest-guidelines" + flags_).status, 0);
  const CliRun r = Cli(
      "ask \"What should be done if A1C levels are greater than 10?\"" +
      flags_);
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out.rfind("1. 9.1.5 (Grade E)", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("early introduction of insulin should"),
            std::string::npos);
}

TEST_F(CliTest, DataDirPrecedenceFlagEnvConfig) {
  const fs::path env_dir = root_ / "from_env";
  const fs::path flag_dir = root_ / "from_flag";
  ASSERT_EQ(Cli("generate-data" + flags_,
                "CKDCTX_DATA_DIR=" + env_dir.string())
                .status,
            0);
  EXPECT_TRUE(fs::exists(env_dir / "manifest.json"));
  ASSERT_EQ(Cli("generate-data --data-dir " + flag_dir.string() + flags_,
                "CKDCTX_DATA_DIR=" + env_dir.string())
                .status,
            0);
  EXPECT_TRUE(fs::exists(flag_dir / "manifest.json"));
  ASSERT_EQ(Cli("generate-data" + flags_).status, 0);
  EXPECT_TRUE(fs::exists(root_ / "ws/manifest.json"));  // config data_dir
}

TEST_F(CliTest, FullRunThenReportAndContext) {
  for (const char* step :
       {"generate-data", "build-cohort", "train --kind LR", "train --kind MLP",
        "evaluate --kind MLP", "explain", "prototypes", "ingest-guidelines"}) {
    const CliRun r = Cli(std::string(step) + flags_);
    ASSERT_EQ(r.status, 0) << step << ": " << r.out;
  }
  const fs::path out = root_ / "report.md";
  ASSERT_EQ(Cli("report --output " + out.string() + flags_).status, 0);
  const std::string md = ReadFile(out);
  EXPECT_NE(md.find("| Method | Precision | Recall | AUC-ROC | AUC-PRC | Brier |"),
            std::string::npos);
  EXPECT_NE(md.find("| n | 4 |"), std::string::npos);
  CliRun r = Cli("report --sections question_flow,metrics --format json" + flags_);
  ASSERT_EQ(r.status, 0);
  const Json js = ParseJson(r.out, "report");
  const std::string patient = js["sections"]["question_flow"]["patient_id"];
  r = Cli("context --kind Q4 --patient-id " + patient + flags_);
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("risk is found to be 0."), std::string::npos);
  EXPECT_NE(r.out.find("Source: Guidelines; Relevance: Both"),
            std::string::npos);
  r = Cli("context --kind Q2" + flags_);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("patient_id"), std::string::npos);
}

}  // namespace
}  // namespace ckdctx
