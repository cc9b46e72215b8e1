// Copyright 2026 The invbench Authors.
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

#include "invbench/config_io.hpp"

#include <string>

#include <gtest/gtest.h>

#include "invbench/errors.hpp"

namespace invbench {
namespace {

std::string ExpectInvalid(const std::string& text) {
  try {
    ParseSweepConfig(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

TEST(ConfigIoTest, EmptyObjectGivesDefaults) {
  const SweepConfig cfg = ParseSweepConfig("{}");
  EXPECT_EQ(cfg.trials, 20);
  EXPECT_EQ(cfg.weight_stds, (std::vector<double>{0.35, 0.1}));
  EXPECT_EQ(cfg.settings.size(), 4u);
  EXPECT_EQ(cfg.methods.size(), 3u);
  EXPECT_EQ(cfg.base.env_scales, (std::vector<double>{0.2, 2.0, 5.0}));
  EXPECT_EQ(cfg.irm_hp.lambda_max, 100.0);
}

TEST(ConfigIoTest, ResolvedConfigRoundTrips) {
  SweepConfig cfg;
  cfg.base.d1 = 3;
  cfg.base.master_seed = 123456789012345ULL;
  cfg.settings = {SettingId::kHetConf, SettingId::kHom};
  cfg.methods = {Method::kErmSgd};
  cfg.irm_hp.line_search = false;
  cfg.sgd_hp.shuffle_seed = 9;
  cfg.out_dir = "somewhere/else";
  const std::string text = SweepConfigToJson(cfg);
  EXPECT_EQ(SweepConfigToJson(ParseSweepConfig(text)), text);
}

TEST(ConfigIoTest, PartialConfigKeepsOtherDefaults) {
  const SweepConfig cfg = ParseSweepConfig(
      R"({"trials": 3, "base": {"d1": 2}, "irm_hp": {"max_iters": 10},
          "settings": ["het"], "methods": ["ErmAnalytic", "IrmV1"]})");
  EXPECT_EQ(cfg.trials, 3);
  EXPECT_EQ(cfg.base.d1, 2);
  EXPECT_EQ(cfg.base.d2, 5);
  EXPECT_EQ(cfg.irm_hp.max_iters, 10);
  EXPECT_EQ(cfg.irm_hp.warmup_iters, 1000);
  EXPECT_EQ(cfg.settings, std::vector<SettingId>{SettingId::kHet});
  EXPECT_EQ(cfg.methods,
            (std::vector<Method>{Method::kErmAnalytic, Method::kIrmV1}));
}

TEST(ConfigIoTest, UnknownKeysAreNamed) {
  EXPECT_NE(ExpectInvalid(R"({"trails": 3})").find("'trails'"),
            std::string::npos);
  EXPECT_NE(ExpectInvalid(R"({"base": {"d3": 1}})").find("'base.d3'"),
            std::string::npos);
  EXPECT_NE(ExpectInvalid(R"({"irm_hp": {"lr": 1}})").find("'irm_hp.lr'"),
            std::string::npos);
  EXPECT_NE(ExpectInvalid(R"({"sgd_hp": {"momentum": 0.9}})")
                .find("'sgd_hp.momentum'"),
            std::string::npos);
  // Per-cell fields are not part of the template.
  EXPECT_NE(ExpectInvalid(R"({"base": {"weight_std": 0.2}})")
                .find("'base.weight_std'"),
            std::string::npos);
}

TEST(ConfigIoTest, TypeAndValueErrors) {
  ExpectInvalid("not json");
  ExpectInvalid("[1, 2]");
  ExpectInvalid(R"({"trials": "many"})");
  ExpectInvalid(R"({"trials": 2.5})");
  ExpectInvalid(R"({"trials": 0})");
  ExpectInvalid(R"({"base": {"master_seed": -1}})");
  ExpectInvalid(R"({"settings": ["hom", "bogus"]})");
  ExpectInvalid(R"({"settings": "hom"})");
  ExpectInvalid(R"({"methods": ["Lasso"]})");
  ExpectInvalid(R"({"weight_stds": []})");
  ExpectInvalid(R"({"weight_stds": [0.1, 0.1]})");
  ExpectInvalid(R"({"base": {"env_scales": [1.0, 0.0]}})");
  ExpectInvalid(R"({"sgd_hp": {"batch_size": 100000}})");
}

TEST(ConfigIoTest, MissingFileIsAnIoError) {
  try {
    LoadSweepConfig("/nonexistent/dir/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

}  // namespace
}  // namespace invbench
