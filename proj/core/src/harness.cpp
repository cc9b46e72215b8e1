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

#include "invbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <system_error>
#include <thread>

#include "invbench/config_io.hpp"
#include "invbench/errors.hpp"
#include "json.hpp"

#ifndef INVBENCH_VERSION
#define INVBENCH_VERSION "0.0.0"
#endif

namespace invbench {
namespace {

using nlohmann::json;

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

[[noreturn]] void IoFailure(const std::string& what) {
  throw Error(ErrorCode::kIoError, what);
}

// Linear interpolation between order statistics (R type 7).
double Quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MetricStats Stats(std::vector<double> v) {
  MetricStats s;
  std::sort(v.begin(), v.end());
  s.median = Quantile(v, 0.5);
  s.q25 = Quantile(v, 0.25);
  s.q75 = Quantile(v, 0.75);
  s.mean = v.empty() ? std::nan("")
                     : std::accumulate(v.begin(), v.end(), 0.0) /
                           static_cast<double>(v.size());
  return s;
}

json StatsJson(const MetricStats& s) {
  return {{"median", s.median}, {"mean", s.mean}, {"q25", s.q25},
          {"q75", s.q75}};
}

std::string ShortNumber(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::filesystem::path PlotFileName(SettingId setting, double weight_std) {
  return "plot_" + std::string(SettingName(setting)) + "_wstd" +
         ShortNumber(weight_std) + ".csv";
}

template <typename T>
std::size_t PositionIn(const std::vector<T>& v, const T& x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

void WriteFileAtomically(const std::filesystem::path& path,
                         const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) IoFailure("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) IoFailure("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) IoFailure("cannot replace '" + path.string() + "': " + ec.message());
}

struct Cell {
  SettingId setting;
  double weight_std;
  int trial;
};

// Serializes appends to the incrementally written results.csv.
class ResultSink {
 public:
  explicit ResultSink(const std::filesystem::path& path)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) IoFailure("cannot write '" + path.string() + "'");
    out_ << kResultsHeader << '\n';
    out_.flush();
  }

  void Append(std::vector<TrialResult> rows) {
    std::string text;
    for (const auto& r : rows) text += FormatResultRow(r) + '\n';
    std::lock_guard<std::mutex> lock(mu_);
    // Whole rows only, so an interrupted run leaves a parseable file.
    out_ << text;
    out_.flush();
    for (auto& r : rows) rows_.push_back(std::move(r));
  }

  std::vector<TrialResult> Take() {
    std::lock_guard<std::mutex> lock(mu_);
    out_.close();
    return std::move(rows_);
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
  std::vector<TrialResult> rows_;
};

}  // namespace

std::string_view Version() { return INVBENCH_VERSION; }

void SweepConfig::Validate() const {
  if (trials < 1) Invalid("trials must be >= 1");
  if (weight_stds.empty()) Invalid("weight_stds must be non-empty");
  if (settings.empty()) Invalid("settings must be non-empty");
  if (methods.empty()) Invalid("methods must be non-empty");
  if (std::set<double>(weight_stds.begin(), weight_stds.end()).size() !=
      weight_stds.size())
    Invalid("weight_stds contains duplicates");
  if (std::set<SettingId>(settings.begin(), settings.end()).size() !=
      settings.size())
    Invalid("settings contains duplicates");
  if (std::set<Method>(methods.begin(), methods.end()).size() !=
      methods.size())
    Invalid("methods contains duplicates");
  for (SettingId s : settings) {
    for (double w : weight_stds) {
      ScmConfig c = MakeSettingConfig(base, s);
      c.weight_std = w;
      c.Validate();
    }
  }
  irm_hp.Validate();
  sgd_hp.Validate();
  const bool uses_sgd =
      std::find(methods.begin(), methods.end(), Method::kErmSgd) !=
      methods.end();
  const long long pooled =
      static_cast<long long>(base.n_per_env) *
      static_cast<long long>(base.env_scales.size());
  if (uses_sgd && sgd_hp.batch_size > pooled)
    Invalid("sgd batch_size exceeds pooled training sample count");
  if (out_dir.empty()) Invalid("out_dir must be non-empty");
}

std::uint64_t TrialStreamSeed(std::uint64_t master_seed, SettingId setting,
                              int trial, std::string_view label) {
  return DeriveSeed(master_seed, SettingName(setting),
                    static_cast<std::uint64_t>(trial), label);
}

TrialData PrepareTrial(SettingId setting, double weight_std, int trial,
                       const SweepConfig& cfg) {
  TrialData data;
  data.config = MakeSettingConfig(cfg.base, setting);
  data.config.weight_std = weight_std;
  data.config.Validate();
  const std::uint64_t master = cfg.base.master_seed;
  data.seed = TrialStreamSeed(master, setting, trial, "trial");

  RandomStream gt_rng(TrialStreamSeed(master, setting, trial, "ground_truth"));
  data.gt = SampleGroundTruth(data.config, gt_rng);

  const auto& scales = data.config.env_scales;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    RandomStream env_rng(TrialStreamSeed(master, setting, trial,
                                         "train_env_" + std::to_string(k)));
    data.train.push_back(
        SampleEnvironment(data.gt, data.config, scales[k], env_rng));
  }
  RandomStream test_rng(TrialStreamSeed(master, setting, trial, "test_env"));
  const double test_scale = *std::max_element(scales.begin(), scales.end());
  data.test = SampleEnvironment(data.gt, data.config, test_scale, test_rng);
  return data;
}

std::vector<TrialResult> RunTrial(SettingId setting, double weight_std,
                                  int trial, const SweepConfig& cfg,
                                  TrialDiagnostics* diagnostics) {
  const TrialData data = PrepareTrial(setting, weight_std, trial, cfg);
  const std::uint64_t master = cfg.base.master_seed;
  const Eigen::Index dim = data.config.dim();

  std::vector<TrialResult> rows;
  for (Method method : cfg.methods) {
    TrialResult row;
    row.setting = setting;
    row.weight_std = weight_std;
    row.trial = trial;
    row.method = method;
    row.seed = data.seed;
    try {
      Regressor fitted;
      switch (method) {
        case Method::kIrmV1: {
          RandomStream init_rng(
              TrialStreamSeed(master, setting, trial, "irm_init"));
          Regressor init;
          init.phi.resize(dim);
          for (Eigen::Index k = 0; k < dim; ++k)
            init.phi[k] = kIrmInitStd * init_rng.Normal();
          IrmFit fit = TrainIrmV1(data.train, cfg.irm_hp, init,
                                  diagnostics != nullptr);
          fitted = fit.regressor;
          if (diagnostics) {
            diagnostics->irm = std::move(fit);
            diagnostics->irm_ran = true;
          }
          break;
        }
        case Method::kErmAnalytic:
          fitted = ErmAnalytic(data.train);
          break;
        case Method::kErmSgd: {
          SgdHyperparams hp = cfg.sgd_hp;
          hp.shuffle_seed =
              Mix64(TrialStreamSeed(master, setting, trial, "sgd_shuffle") ^
                    cfg.sgd_hp.shuffle_seed);
          Regressor init;
          init.phi = Eigen::VectorXd::Zero(dim);
          fitted = ErmSgd(data.train, hp, init);
          break;
        }
      }
      const Evaluation ev = Evaluate(fitted, data.gt, data.test);
      if (diagnostics) diagnostics->fitted.emplace_back(method, fitted);
      if (!std::isfinite(ev.causal_err) || !std::isfinite(ev.noncausal_err) ||
          !std::isfinite(ev.test_mse)) {
        row.status = ErrorCodeName(ErrorCode::kNonFiniteObjective);
      } else {
        row.causal_err = ev.causal_err;
        row.noncausal_err = ev.noncausal_err;
        row.test_mse = ev.test_mse;
      }
    } catch (const Error& e) {
      row.status = ErrorCodeName(e.code());
    }
    rows.push_back(std::move(row));
  }
  if (diagnostics) diagnostics->data = data;
  return rows;
}

const MethodSummary* CellSummary::Find(Method m) const {
  for (const auto& s : methods)
    if (s.method == m) return &s;
  return nullptr;
}

const CellSummary* SweepSummary::Find(SettingId setting,
                                      double weight_std) const {
  for (const auto& c : cells)
    if (c.setting == setting && c.weight_std == weight_std) return &c;
  return nullptr;
}

SweepSummary Summarize(const std::vector<TrialResult>& rows,
                       const SweepConfig& cfg) {
  SweepSummary summary;
  for (SettingId s : cfg.settings) {
    for (double w : cfg.weight_stds) {
      CellSummary cell;
      cell.setting = s;
      cell.weight_std = w;
      for (Method m : cfg.methods) {
        MethodSummary ms;
        ms.method = m;
        std::vector<double> causal, noncausal, mse;
        for (const auto& r : rows) {
          if (r.setting != s || r.weight_std != w || r.method != m) continue;
          if (!r.ok()) {
            ++ms.n_failed;
            continue;
          }
          ++ms.n_ok;
          causal.push_back(r.causal_err);
          noncausal.push_back(r.noncausal_err);
          mse.push_back(r.test_mse);
        }
        ms.causal_err = Stats(std::move(causal));
        ms.noncausal_err = Stats(std::move(noncausal));
        ms.test_mse = Stats(std::move(mse));
        cell.methods.push_back(ms);
      }
      summary.cells.push_back(std::move(cell));
    }
  }
  return summary;
}

void SortResults(std::vector<TrialResult>& rows, const SweepConfig& cfg) {
  auto key = [&cfg](const TrialResult& r) {
    return std::make_tuple(PositionIn(cfg.settings, r.setting),
                           PositionIn(cfg.weight_stds, r.weight_std), r.trial,
                           PositionIn(cfg.methods, r.method));
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&key](const TrialResult& a, const TrialResult& b) {
                     return key(a) < key(b);
                   });
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string FormatResultRow(const TrialResult& r) {
  std::string line;
  line += SettingName(r.setting);
  line += ',';
  line += NoiseModelName(SettingNoiseModel(r.setting));
  line += ',';
  line += SettingHasConfounder(r.setting) ? "true" : "false";
  line += ',' + FormatDouble(r.weight_std);
  line += ',' + std::to_string(r.trial);
  line += ',';
  line += MethodName(r.method);
  if (r.ok()) {
    line += ',' + FormatDouble(r.causal_err);
    line += ',' + FormatDouble(r.noncausal_err);
    line += ',' + FormatDouble(r.test_mse);
  } else {
    line += ",,,";
  }
  line += ',' + std::to_string(r.seed);
  line += ',' + r.status;
  return line;
}

std::string SummaryToJson(const SweepSummary& summary, const SweepConfig& cfg) {
  json cells = json::array();
  for (const auto& c : summary.cells) {
    json methods = json::object();
    for (const auto& m : c.methods) {
      methods[std::string(MethodName(m.method))] = {
          {"n_ok", m.n_ok},
          {"n_failed", m.n_failed},
          {"causal_err", StatsJson(m.causal_err)},
          {"noncausal_err", StatsJson(m.noncausal_err)},
          {"test_mse", StatsJson(m.test_mse)},
      };
    }
    cells.push_back({
        {"setting", SettingName(c.setting)},
        {"noise_model", NoiseModelName(SettingNoiseModel(c.setting))},
        {"confounder", SettingHasConfounder(c.setting)},
        {"weight_std", c.weight_std},
        {"methods", methods},
    });
  }
  const auto& scales = cfg.base.env_scales;
  const json doc = {
      {"artifact", "invbench"},
      {"version", Version()},
      {"config", json::parse(SweepConfigToJson(cfg))},
      {"irm_init_std", kIrmInitStd},
      {"held_out_environment",
       {{"scale", *std::max_element(scales.begin(), scales.end())},
        {"rule", "largest training scale, fresh test_env substream"}}},
      {"failed_rows_excluded_from_stats", true},
      {"cells", cells},
  };
  return doc.dump(2) + "\n";
}

int ResolveThreadCount() {
  if (const char* env = std::getenv("INVBENCH_THREADS"); env && *env) {
    const std::string_view text(env);
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value < 1)
      Invalid("INVBENCH_THREADS must be a positive integer, got '" +
              std::string(text) + "'");
    return value;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepOutput RunSweep(const SweepConfig& cfg, int threads) {
  cfg.Validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir))
    IoFailure("cannot create output directory '" + cfg.out_dir.string() +
              "'" + (ec ? ": " + ec.message() : std::string()));

  std::vector<Cell> cells;
  for (SettingId s : cfg.settings)
    for (double w : cfg.weight_stds)
      for (int t = 0; t < cfg.trials; ++t) cells.push_back({s, w, t});

  const std::filesystem::path results_path = cfg.out_dir / "results.csv";
  ResultSink sink(results_path);

  if (threads <= 0) threads = ResolveThreadCount();
  threads = std::min<int>(threads, static_cast<int>(cells.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const Cell& c = cells[i];
        sink.Append(RunTrial(c.setting, c.weight_std, c.trial, cfg));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  SweepOutput output;
  output.rows = sink.Take();
  SortResults(output.rows, cfg);

  std::string csv(kResultsHeader);
  csv += '\n';
  for (const auto& r : output.rows) csv += FormatResultRow(r) + '\n';
  WriteFileAtomically(results_path, csv);

  output.summary = Summarize(output.rows, cfg);
  WriteFileAtomically(cfg.out_dir / "summary.json",
                      SummaryToJson(output.summary, cfg));

  for (SettingId s : cfg.settings) {
    for (double w : cfg.weight_stds) {
      std::string plot(kPlotHeader);
      plot += '\n';
      for (const auto& r : output.rows) {
        if (r.setting != s || r.weight_std != w) continue;
        plot += std::string(MethodName(r.method)) + ',' +
                std::to_string(r.trial) + ',';
        if (r.ok())
          plot += FormatDouble(r.causal_err) + ',' +
                  FormatDouble(r.noncausal_err) + ',' +
                  FormatDouble(r.test_mse);
        else
          plot += ",,";
        plot += '\n';
      }
      WriteFileAtomically(cfg.out_dir / PlotFileName(s, w), plot);
    }
  }
  return output;
}

}  // namespace invbench
