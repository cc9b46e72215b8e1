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

#include "invbench/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "invbench/config_io.hpp"
#include "invbench/errors.hpp"
#include "invbench/gradcheck.hpp"
#include "invbench/harness.hpp"

namespace invbench {
namespace {

SweepConfig ConfigOrDefault(const std::string& path) {
  return path.empty() ? SweepConfig{} : LoadSweepConfig(path);
}

void WriteTrace(const IrmFit& fit, std::ostream& os, int stride) {
  os << "iteration,lambda,objective,risk_sum,penalty_sum,grad_norm,step\n";
  for (std::size_t i = 0; i < fit.trace.size(); ++i) {
    if (stride > 1 && i % stride != 0 && i + 1 != fit.trace.size()) continue;
    const IrmTraceRow& r = fit.trace[i];
    os << r.iteration << ',' << FormatDouble(r.lambda) << ','
       << FormatDouble(r.objective) << ',' << FormatDouble(r.risk_sum) << ','
       << FormatDouble(r.penalty_sum) << ',' << FormatDouble(r.grad_norm)
       << ',' << FormatDouble(r.step) << '\n';
  }
}

std::string Cell(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void PrintComparison(const SweepOutput& result, const SweepConfig& cfg,
                     std::ostream& out) {
  out << std::left << std::setw(10) << "setting" << std::setw(10)
      << "w_std" << std::setw(11) << "IRM.caus" << std::setw(11)
      << "ERM.caus" << std::setw(11) << "SGD.caus" << std::setw(11)
      << "IRM.ncau" << std::setw(11) << "ERM.ncau" << std::setw(8)
      << "failed" << "better(causal)\n";
  for (const auto& cell : result.summary.cells) {
    const MethodSummary* irm = cell.Find(Method::kIrmV1);
    const MethodSummary* erm = cell.Find(Method::kErmAnalytic);
    const MethodSummary* sgd = cell.Find(Method::kErmSgd);
    auto causal = [](const MethodSummary* m) {
      return m ? m->causal_err.median : std::nan("");
    };
    auto noncausal = [](const MethodSummary* m) {
      return m ? m->noncausal_err.median : std::nan("");
    };
    int failed = 0;
    for (const auto& m : cell.methods) failed += m.n_failed;
    std::string better = "n/a";
    if (irm && erm && irm->n_ok > 0 && erm->n_ok > 0)
      better = causal(irm) < causal(erm) ? "IRM" : "ERM";
    out << std::left << std::setw(10) << SettingName(cell.setting)
        << std::setw(10) << Cell(cell.weight_std) << std::setw(11)
        << Cell(causal(irm)) << std::setw(11) << Cell(causal(erm))
        << std::setw(11) << Cell(causal(sgd)) << std::setw(11)
        << Cell(noncausal(irm)) << std::setw(11) << Cell(noncausal(erm))
        << std::setw(8) << failed << better << '\n';
  }
  out << "(medians over " << cfg.trials
      << " trials; failed rows excluded; outputs in " << cfg.out_dir.string()
      << ")\n";
}

}  // namespace

int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Linear IRMv1 vs ERM unit-test benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(Version()));

  std::string config_path;
  std::string out_dir;

  auto* sweep = app.add_subcommand("sweep", "Run a configured sweep");
  sweep->add_option("--config", config_path, "JSON sweep config")->required();
  sweep->add_option("--out", out_dir, "Output directory (overrides out_dir)");

  std::string setting_name;
  double weight_std = 0.0;
  int trial_index = 0;
  std::string trace_path;
  int trace_stride = 100;
  auto* trial = app.add_subcommand("trial", "Run one cell and dump its IRM trace");
  trial->add_option("--setting", setting_name, "hom, het, hom_conf or het_conf")
      ->required();
  trial->add_option("--weight-std", weight_std, "Ground-truth weight std")
      ->required();
  trial->add_option("--trial", trial_index, "Trial index")->required();
  trial->add_option("--config", config_path, "JSON sweep config");
  trial->add_option("--trace", trace_path, "Write the full IRM trace here");
  trial->add_option("--trace-stride", trace_stride,
                    "Row stride when printing the trace to stdout");

  std::uint64_t seed = 0;
  int cases = 100;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference gradient suite");
  gradcheck->add_option("--seed", seed, "Random seed")->required();
  gradcheck->add_option("--cases", cases, "Number of random cases");

  auto* fig2 = app.add_subcommand(
      "reproduce-fig2", "Run the default sweep and print IRM vs ERM medians");
  fig2->add_option("--out", out_dir, "Output directory")->required();
  fig2->add_option("--config", config_path, "JSON sweep config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sweep || *fig2) {
      SweepConfig cfg = ConfigOrDefault(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      const SweepOutput result = RunSweep(cfg);
      std::size_t failed = 0;
      for (const auto& r : result.rows) failed += r.ok() ? 0 : 1;
      if (*fig2) {
        PrintComparison(result, cfg, out);
      } else {
        out << result.rows.size() << " rows (" << failed << " failed) written to "
            << cfg.out_dir.string() << "\n";
      }
      return kExitOk;
    }

    if (*trial) {
      const SweepConfig cfg = ConfigOrDefault(config_path);
      cfg.Validate();
      const SettingId id = ParseSetting(setting_name);
      if (trial_index < 0)
        throw Error(ErrorCode::kInvalidConfig, "--trial must be >= 0");
      TrialDiagnostics diag;
      const auto rows = RunTrial(id, weight_std, trial_index, cfg, &diag);
      out << kResultsHeader << '\n';
      for (const auto& r : rows) out << FormatResultRow(r) << '\n';
      if (diag.irm_ran) {
        out << "# irm iterations=" << diag.irm.iterations
            << " converged=" << (diag.irm.converged ? "true" : "false")
            << " stalled=" << (diag.irm.stalled ? "true" : "false") << '\n';
        if (!trace_path.empty()) {
          std::ofstream tf(trace_path, std::ios::binary);
          if (!tf)
            throw Error(ErrorCode::kIoError,
                        "cannot write trace file '" + trace_path + "'");
          WriteTrace(diag.irm, tf, 1);
          out << "# trace written to " << trace_path << '\n';
        } else {
          WriteTrace(diag.irm, out, trace_stride);
        }
      }
      return kExitOk;
    }

    if (*gradcheck) {
      if (cases < 1)
        throw Error(ErrorCode::kInvalidConfig, "--cases must be >= 1");
      const GradientCheckReport report = RunGradientChecks(seed, cases);
      int bad = 0;
      for (std::size_t i = 0; i < report.cases.size(); ++i) {
        const auto& c = report.cases[i];
        if (c.max_rel_error <= report.tolerance) continue;
        ++bad;
        err << "case " << i << ": envs=" << c.num_envs
            << " n=" << c.samples_per_env << " d=" << c.dim
            << " bias=" << c.with_bias << " lambda=" << c.lambda
            << " rel_err=" << c.max_rel_error << '\n';
      }
      out << "gradcheck seed=" << seed << " cases=" << report.cases.size()
          << " worst_rel_err=" << report.worst()
          << " tolerance=" << report.tolerance << ' '
          << (report.passed() ? "PASS" : "FAIL") << '\n';
      return bad == 0 ? kExitOk : kExitValidation;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kInvalidConfig:
      case ErrorCode::kDimensionMismatch:
        return kExitValidation;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace invbench
