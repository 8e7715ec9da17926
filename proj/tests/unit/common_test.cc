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

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "ckdctx/common/error.h"
#include "ckdctx/common/json_util.h"
#include "ckdctx/common/rng.h"
#include "gtest/gtest.h"

namespace ckdctx {
namespace {

TEST(JsonUtilTest, CanonicalDumpSortsKeysAndEndsWithNewline) {
  Json value = {{"b", 1}, {"a", {{"d", 2}, {"c", 3}}}};
  EXPECT_EQ(DumpCanonical(value),
            "{\n  \"a\": {\n    \"c\": 3,\n    \"d\": 2\n  },\n  \"b\": 1\n}\n");
}

TEST(JsonUtilTest, ParseErrorIsValidation) {
  try {
    ParseJson("{not json", "request body");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
  }
}

TEST(JsonUtilTest, RequireFieldReportsPath) {
  Json obj = {{"a", "text"}};
  try {
    RequireNumber(obj, "a", "/root");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidation);
    EXPECT_EQ(e.path(), "/root/a");
  }
  try {
    RequireString(obj, "missing", "/root");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.path(), "/root/missing");
  }
}

TEST(JsonUtilTest, RejectUnknownFields) {
  Json obj = {{"a", 1}, {"zz", 2}};
  EXPECT_NO_THROW(RejectUnknownFields(obj, {"a", "zz"}, ""));
  try {
    RejectUnknownFields(obj, {"a"}, "/cfg");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.path(), "/cfg/zz");
  }
}

TEST(JsonUtilTest, Formatting) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(10.0), "10");
  EXPECT_EQ(FormatFixed(0.8349, 2), "0.83");
  EXPECT_EQ(FormatFixed(0.835, 2), "0.83");  // binary 0.83499999...
}

TEST(JsonUtilTest, AtomicWriteRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "ckdctx_common";
  std::filesystem::create_directories(dir);
  const auto path = dir / "x.json";
  WriteJsonFile(path, {{"k", 1.5}});
  EXPECT_EQ(ReadJsonFile(path), (Json{{"k", 1.5}}));
  EXPECT_EQ(ReadFile(path), "{\n  \"k\": 1.5\n}\n");
  EXPECT_THROW(ReadFile(dir / "absent.json"), Error);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  std::vector<double> xa, xb, xc;
  for (int i = 0; i < 10; ++i) {
    xa.push_back(a.Uniform());
    xb.push_back(b.Uniform());
    xc.push_back(c.Uniform());
  }
  EXPECT_EQ(xa, xb);
  EXPECT_NE(xa, xc);
}

TEST(RngTest, RangesAndPermutation) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const auto k = rng.Between(-3, 3);
    ASSERT_GE(k, -3);
    ASSERT_LE(k, 3);
  }
  std::vector<std::size_t> perm = rng.Permutation(50);
  std::sort(perm.begin(), perm.end());
  std::vector<std::size_t> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(perm, expected);
}

TEST(RngTest, NormalMoments) {
  Rng rng(9);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.Normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / n, 1.0, 0.02);
}

TEST(StableHashTest, Fnv1aVectors) {
  EXPECT_EQ(StableHash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(StableHash("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(StableHash("foobar"), 0x85944171f73967e8ULL);
}

TEST(ErrorTest, CodeNames) {
  EXPECT_EQ(ErrorCodeName(ErrorCode::kNotFound), "not_found");
  Error e(ErrorCode::kConfig, "bad", "seed");
  EXPECT_EQ(e.code(), ErrorCode::kConfig);
  EXPECT_EQ(e.path(), "seed");
  EXPECT_STREQ(e.what(), "bad");
}

}  // namespace
}  // namespace ckdctx
