// Copyright 2026 The LMTN Authors. All Rights Reserved.
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


#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lmtn/error.hpp"
#include "lmtn/experiments.hpp"
#include "lmtn/io.hpp"
#include "lmtn/mask.hpp"
#include "lmtn/metrics.hpp"
#include "run_config.hpp"

namespace lmtn::cli {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << body;
  if (!out) throw FormatError("write failed for " + path);
}

json rank_json(const RankMatrix& r) { return r.rows(); }

struct SolveOptions {
  std::string config_path;
  bool timing = true;
};

// Shared body of `decompose` and `complete`.
int solve(const SolveOptions& opts, bool full_mask) {
  const RunConfig cfg = load_run_config(opts.config_path);
  if (cfg.input.empty()) throw FormatError("config needs an input path");
  const DenseTensor truth = read_tensor(cfg.input);
  ObservationMask mask(truth.shape(), true);
  if (!full_mask) {
    if (cfg.mask) {
      mask = read_mask(*cfg.mask);
      if (mask.shape() != truth.shape()) {
        throw FormatError("mask shape does not match the input tensor");
      }
    } else {
      mask = sample_mask(truth.shape(), cfg.missing_rate,
                         derive_seed(cfg.seed, 2));
    }
  }
  SolverConfig sc = cfg.to_solver_config(truth.shape());

  std::ostringstream csv;
  csv << kMetricsCsvHeader << '\n';
  sc.on_iteration = [&](const IterationRecord& rec, const DenseTensor& x,
                        const DenseTensor& z) {
    const DenseTensor& est = full_mask ? z : x;
    csv << rec.iter << ',' << fmt_double(rec.objective) << ','
        << fmt_double(rec.rel_change) << ',' << fmt_double(rse(est, truth))
        << ',' << fmt_double(psnr(est, truth)) << ','
        << fmt_double(ssim(est, truth)) << ','
        << fmt_double(opts.timing ? rec.wall_ms : 0.0) << '\n';
  };
  const SolverResult result = run_solver(cfg.solver, project(truth, mask),
                                         mask, sc);

  const DenseTensor out_tensor =
      full_mask ? lmtn_compose(result.model) : result.x;
  write_tensor(out_tensor, cfg.output + ".lmtn");
  write_text(cfg.output + "_metrics.csv", csv.str());

  json report = json::parse(report_to_json(result.report, opts.timing));
  const SsimResult s = ssim_detailed(out_tensor, truth);
  report["final"] = {{"rse", rse(out_tensor, truth)},
                     {"psnr", psnr(out_tensor, truth)},
                     {"ssim", s.value},
                     {"ssim_window_fallback", s.window_fallback},
                     {"compression_ratio",
                      compression_ratio(result.model, truth.shape())}};
  report["observed"] = mask.observed_count();
  write_text(cfg.output + "_report.json", report.dump(2) + "\n");

  if (result.report.termination == Termination::kError) {
    std::cerr << "lmtn: numerical failure: " << result.report.error << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int gen(const std::string& config_path) {
  const RunConfig cfg = load_run_config(config_path);
  if (!cfg.shape) throw FormatError("gen needs \"shape\" in the config");
  if (cfg.input.empty()) throw FormatError("gen needs an input path to write");
  const RankMatrix& rank = cfg.solver_rank();
  const PlantedInstance planted =
      make_planted(*cfg.shape, rank, derive_seed(cfg.seed, 0), true);
  write_tensor(planted.tensor, cfg.input);
  const ObservationMask mask =
      sample_mask(*cfg.shape, cfg.missing_rate, derive_seed(cfg.seed, 2));
  write_mask(mask, cfg.mask ? *cfg.mask : cfg.input + ".mask");
  return kExitOk;
}

int bench(const std::string& name, std::uint64_t seed, int maxit,
          const std::string& out_path) {
  ExperimentPlan plan;
  plan.kind = experiment_from_string(name);
  plan.root_seed = seed;
  plan.solver.maxit = maxit;
  if (plan.kind == ExperimentKind::kTauSweep) {
    plan.solve_rank = RankMatrix::uniform(3, 3, 8);
  }
  std::ostringstream csv;
  csv << experiment_csv_header() << '\n';
  for (const auto& row : run_experiment(plan)) {
    csv << experiment_csv_row(row) << '\n';
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    write_text(out_path, csv.str());
  }
  return kExitOk;
}

int metrics(const std::string& a_path, const std::string& b_path) {
  const DenseTensor a = read_tensor(a_path);
  const DenseTensor b = read_tensor(b_path);
  if (a.shape() != b.shape()) throw FormatError("tensor shapes differ");
  json out = {{"rse", rse(a, b)},
              {"psnr", psnr(a, b)},
              {"mse", mean_squared_error(a, b)}};
  if (a.order() >= 2) {
    const SsimResult s = ssim_detailed(a, b);
    out["ssim"] = s.value;
    out["ssim_window_fallback"] = s.window_fallback;
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

std::string report_to_json(const SolverReport& report, bool timing) {
  json iters = json::array();
  for (const auto& rec : report.iterations) {
    iters.push_back({{"iter", rec.iter},
                     {"objective", rec.objective},
                     {"rel_change", rec.rel_change},
                     {"rel_error", rec.rel_error},
                     {"rank", rank_json(rec.rank)},
                     {"wall_ms", timing ? rec.wall_ms : 0.0}});
  }
  json doc = {{"solver", to_string(report.solver)},
              {"termination", to_string(report.termination)},
              {"error", report.error},
              {"ridge_escalations", report.ridge_escalations},
              {"total_ms", timing ? report.total_ms : 0.0},
              {"iterations", std::move(iters)}};
  return doc.dump(2);
}

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"Latent matrix tensor network decomposition and completion",
               "lmtn"};
  app.require_subcommand(1);

  SolveOptions decompose_opts;
  auto* decompose = app.add_subcommand(
      "decompose", "Decompose a fully observed tensor");
  decompose->add_option("-c,--config", decompose_opts.config_path,
                        "RunConfig JSON")->required();
  decompose->add_flag("--no-timing", [&](std::int64_t) { decompose_opts.timing = false; },
                      "Write zero wall times");

  SolveOptions complete_opts;
  auto* complete = app.add_subcommand("complete",
                                      "Complete a tensor from observed entries");
  complete->add_option("-c,--config", complete_opts.config_path,
                       "RunConfig JSON")->required();
  complete->add_flag("--no-timing", [&](std::int64_t) { complete_opts.timing = false; },
                     "Write zero wall times");

  std::string gen_config;
  auto* gen_cmd = app.add_subcommand("gen", "Write a planted tensor and mask");
  gen_cmd->add_option("-c,--config", gen_config, "RunConfig JSON")->required();

  std::string experiment;
  std::uint64_t bench_seed = 0;
  int bench_maxit = 100;
  std::string bench_out;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment grid");
  bench_cmd->add_option("experiment", experiment,
                        "tau-sweep | transposition | compression | "
                        "completion-grid")->required();
  bench_cmd->add_option("--seed", bench_seed, "Root seed");
  bench_cmd->add_option("--maxit", bench_maxit, "Sweeps per run")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("-o,--out", bench_out, "CSV path (default stdout)");

  std::string metrics_a;
  std::string metrics_b;
  auto* metrics_cmd = app.add_subcommand("metrics", "Compare two tensor files");
  metrics_cmd->add_option("estimate", metrics_a)->required();
  metrics_cmd->add_option("reference", metrics_b)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cerr << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "lmtn: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return gen(gen_config);
    if (*decompose) return solve(decompose_opts, true);
    if (*complete) return solve(complete_opts, false);
    if (*bench_cmd) return bench(experiment, bench_seed, bench_maxit, bench_out);
    if (*metrics_cmd) return metrics(metrics_a, metrics_b);
  } catch (const NumericalError& e) {
    std::cerr << "lmtn: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FormatError& e) {
    std::cerr << "lmtn: " << e.what() << '\n';
    return kExitData;
  } catch (const ShapeError& e) {
    std::cerr << "lmtn: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int cli_main(int argc, const char* const* argv) {
  return cli_main(std::vector<std::string>(argv, argv + argc));
}

}  // namespace lmtn::cli
