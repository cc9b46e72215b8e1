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

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "invbench/errors.hpp"
#include "json.hpp"

namespace invbench {
namespace {

using nlohmann::json;

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

// Reads fields out of one JSON object and rejects any key nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path)
      : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) Invalid(Where("") + " must be a JSON object");
  }

  template <typename T>
  void Read(const char* key, T& out) {
    known_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer())
        Invalid("config key '" + Where(key) + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && !it->is_number_unsigned())
          Invalid("config key '" + Where(key) + "' must be non-negative");
      }
    }
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      Invalid("config key '" + Where(key) + "' has the wrong type");
    }
  }

  const json* Child(const char* key) {
    known_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string Where(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void RejectUnknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it)
      if (!known_.count(it.key()))
        Invalid("unknown config key '" + Where(it.key()) + "'");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> known_;
};

void ReadBase(const json& j, ScmConfig& base) {
  ObjectReader r(j, "base");
  r.Read("d1", base.d1);
  r.Read("d2", base.d2);
  r.Read("dh", base.dh);
  r.Read("env_scales", base.env_scales);
  r.Read("n_per_env", base.n_per_env);
  r.Read("master_seed", base.master_seed);
  r.Read("sigma_y_scale", base.sigma_y_scale);
  r.Read("sigma_2_scale", base.sigma_2_scale);
  r.RejectUnknown();
}

void ReadIrm(const json& j, IrmHyperparams& hp) {
  ObjectReader r(j, "irm_hp");
  r.Read("lambda_max", hp.lambda_max);
  r.Read("warmup_iters", hp.warmup_iters);
  r.Read("step_size", hp.step_size);
  r.Read("max_iters", hp.max_iters);
  r.Read("grad_tol", hp.grad_tol);
  r.Read("line_search", hp.line_search);
  r.RejectUnknown();
}

void ReadSgd(const json& j, SgdHyperparams& hp) {
  ObjectReader r(j, "sgd_hp");
  r.Read("step_size", hp.step_size);
  r.Read("epochs", hp.epochs);
  r.Read("batch_size", hp.batch_size);
  r.Read("shuffle_seed", hp.shuffle_seed);
  r.RejectUnknown();
}

json BaseToJson(const ScmConfig& b) {
  return {{"d1", b.d1},
          {"d2", b.d2},
          {"dh", b.dh},
          {"env_scales", b.env_scales},
          {"n_per_env", b.n_per_env},
          {"master_seed", b.master_seed},
          {"sigma_y_scale", b.sigma_y_scale},
          {"sigma_2_scale", b.sigma_2_scale}};
}

}  // namespace

SweepConfig ParseSweepConfig(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Invalid(std::string("config is not valid JSON: ") + e.what());
  }

  SweepConfig cfg;
  ObjectReader top(doc, "");
  if (const json* b = top.Child("base")) ReadBase(*b, cfg.base);
  top.Read("weight_stds", cfg.weight_stds);

  std::vector<std::string> names;
  bool have_settings = false;
  if (const json* s = top.Child("settings")) {
    try {
      names = s->get<std::vector<std::string>>();
    } catch (const json::exception&) {
      Invalid("config key 'settings' must be a list of strings");
    }
    have_settings = true;
  }
  if (have_settings) {
    cfg.settings.clear();
    for (const auto& n : names) cfg.settings.push_back(ParseSetting(n));
  }

  if (const json* m = top.Child("methods")) {
    std::vector<std::string> mnames;
    try {
      mnames = m->get<std::vector<std::string>>();
    } catch (const json::exception&) {
      Invalid("config key 'methods' must be a list of strings");
    }
    cfg.methods.clear();
    for (const auto& n : mnames) cfg.methods.push_back(ParseMethod(n));
  }

  top.Read("trials", cfg.trials);
  if (const json* h = top.Child("irm_hp")) ReadIrm(*h, cfg.irm_hp);
  if (const json* h = top.Child("sgd_hp")) ReadSgd(*h, cfg.sgd_hp);
  std::string out_dir = cfg.out_dir.string();
  top.Read("out_dir", out_dir);
  cfg.out_dir = out_dir;
  top.RejectUnknown();

  cfg.Validate();
  return cfg;
}

SweepConfig LoadSweepConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseSweepConfig(buf.str());
}

std::string SweepConfigToJson(const SweepConfig& cfg) {
  json settings = json::array();
  for (SettingId s : cfg.settings) settings.push_back(SettingName(s));
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(MethodName(m));
  const json doc = {
      {"base", BaseToJson(cfg.base)},
      {"weight_stds", cfg.weight_stds},
      {"settings", settings},
      {"methods", methods},
      {"trials", cfg.trials},
      {"irm_hp",
       {{"lambda_max", cfg.irm_hp.lambda_max},
        {"warmup_iters", cfg.irm_hp.warmup_iters},
        {"step_size", cfg.irm_hp.step_size},
        {"max_iters", cfg.irm_hp.max_iters},
        {"grad_tol", cfg.irm_hp.grad_tol},
        {"line_search", cfg.irm_hp.line_search}}},
      {"sgd_hp",
       {{"step_size", cfg.sgd_hp.step_size},
        {"epochs", cfg.sgd_hp.epochs},
        {"batch_size", cfg.sgd_hp.batch_size},
        {"shuffle_seed", cfg.sgd_hp.shuffle_seed}}},
      {"out_dir", cfg.out_dir.string()},
  };
  return doc.dump(2);
}

}  // namespace invbench
