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


// Acceptance suite: one PASS/FAIL line per criterion. Tolerances, runtime
// limits and problem instances are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lmtn/lmtn.hpp"
#include "oracles.hpp"

namespace {

using namespace lmtn;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

LmtnModel random_model(std::mt19937_64& gen, std::size_t order,
                       std::size_t max_size, std::size_t max_rank) {
  std::uniform_int_distribution<std::size_t> size(2, max_size);
  Shape shape(order);
  for (auto& s : shape) s = size(gen);
  const RankMatrix r = testing::random_rank(shape, max_rank, max_rank, gen);
  return init_random_model(shape, r, gen());
}

// 1. Composition against the nested-sum oracles.
Outcome compose_oracle() {
  std::mt19937_64 gen(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_model(gen, 3 + trial % 2, 4, 3);
    worst = std::max(worst, testing::max_abs_diff(fctn_compose(m.cores),
                                                  testing::fctn_oracle(m.cores)));
    worst = std::max(worst, testing::max_abs_diff(lmtn_compose(m),
                                                  testing::lmtn_oracle(m)));
  }
  return {worst <= 1e-12, "max abs diff " + fmt("%.3g", worst) + " (tol 1e-12)"};
}

// 2. FCTN(G) = LMTN(G, M) x_n M_n^T for orthonormal M_n.
Outcome transformation_round_trip() {
  std::mt19937_64 gen(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_model(gen, 3 + trial % 2, 5, 3);
    DenseTensor back = lmtn_compose(m);
    for (std::size_t n = 0; n < m.order(); ++n) {
      back = mode_n_product(back, m.mats[n].transpose(), n);
    }
    const auto f = fctn_compose(m.cores);
    worst = std::max(worst, frobenius_norm(back - f) / frobenius_norm(f));
  }
  return {worst <= 1e-10, "max relative residual " + fmt("%.3g", worst) + " (tol 1e-10)"};
}

// 3. X_(k) = M_k (G_k)_(k) Y_(k) for every k.
Outcome unfolding_identity() {
  std::mt19937_64 gen(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_model(gen, 3 + trial % 2, 5, 3);
    const auto x = lmtn_compose(m);
    const auto latent = latent_nodes(m);
    for (std::size_t k = 0; k < m.order(); ++k) {
      const Matrix lhs = mode_n_unfold(x, k);
      const Matrix rhs = m.mats[k] * mode_n_unfold(m.cores[k], k) *
                         subchain_unfold_excluding(latent, k);
      worst = std::max(worst, (lhs - rhs).norm() / lhs.norm());
    }
  }
  return {worst <= 1e-10, "max relative residual " + fmt("%.3g", worst) + " (tol 1e-10)"};
}

// Shared instance for criteria 4, 5, 8 and 10.
struct RecoveryInstance {
  PlantedInstance planted;
  ObservationMask mask;
  RankMatrix rank;
  std::uint64_t init_seed;
};

const RecoveryInstance& recovery_instance() {
  static const RecoveryInstance inst = [] {
    const Shape shape{12, 12, 12};
    const RankMatrix rank = RankMatrix::uniform(3, 2, 4);
    return RecoveryInstance{make_planted(shape, rank, 106, false),
                            sample_mask(shape, 0.3, 206), rank, 306};
  }();
  return inst;
}

SolverConfig recovery_config(const RankMatrix& rank) {
  SolverConfig c;
  c.rank = rank;
  c.seed = recovery_instance().init_seed;
  c.maxit = 300;
  c.tol = 1e-6;
  return c;
}

// 4. SVD objective trace and recovery.
Outcome svd_monotone_recovery() {
  const auto& inst = recovery_instance();
  auto trace_config = recovery_config(inst.rank);
  trace_config.maxit = 50;
  trace_config.tol = std::numeric_limits<double>::min();
  const auto trace = run_lmtn_svd(inst.planted.tensor, inst.mask, trace_config);
  const auto& it = trace.report.iterations;
  int violations = 0;
  for (std::size_t s = 1; s < it.size(); ++s) {
    if (it[s].objective > it[s - 1].objective * (1.0 + 1e-12)) ++violations;
  }
  const auto r = run_lmtn_svd(inst.planted.tensor, inst.mask,
                              recovery_config(inst.rank));
  const double err = rse(r.x, inst.planted.clean);
  const bool ok = trace.report.termination != Termination::kError &&
                  r.report.termination != Termination::kError &&
                  it.size() == 50 && violations == 0 && err <= 1e-3;
  return {ok, std::to_string(violations) + " increases over " +
                  std::to_string(it.size()) + " sweeps, RSE " +
                  fmt("%.3g", err) + " after " +
                  std::to_string(r.report.iterations.size()) +
                  " sweeps (tol 1e-3)"};
}

// 5. Proximal decrease of every PAM block step.
Outcome pam_proximal_decrease() {
  const auto& inst = recovery_instance();
  auto c = recovery_config(inst.rank);
  c.rho = 0.1;
  c.track_block_steps = true;
  const auto r = run_lmtn_pam(inst.planted.tensor, inst.mask, c);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : r.report.block_steps) worst = std::min(worst, s.slack());
  const double err = rse(r.x, inst.planted.clean);
  const bool ok = r.report.termination != Termination::kError &&
                  !r.report.block_steps.empty() && worst >= -1e-10 &&
                  err <= 1e-3;
  return {ok, "min slack " + fmt("%.3g", worst) + " over " +
                  std::to_string(r.report.block_steps.size()) +
                  " block steps (tol -1e-10), RSE " + fmt("%.3g", err) +
                  " (tol 1e-3)"};
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t v = 1;
  while (e-- > 0) v *= b;
  return v;
}

// 6. Parameter counts on the grid.
Outcome parameter_counts() {
  int mismatches = 0;
  int compared = 0;
  int below = 0;
  for (std::size_t n : {3, 4, 5}) {
    for (std::size_t i : {8, 16}) {
      for (std::size_t r1 : {2, 3}) {
        for (std::size_t r2 : {2, 4}) {
          const Shape shape(n, i);
          const auto m = init_random_model(shape, RankMatrix::uniform(n, r1, r2), 1);
          const std::size_t expect =
              n * r2 * ipow(r1, n - 1) + n * i * r2;
          if (count_parameters(m) != expect) ++mismatches;
          const std::size_t fctn = n * i * ipow(r1, n - 1);
          if (r2 * (ipow(r1, n - 1) + i) < i * ipow(r1, n - 1)) {
            ++compared;
            if (count_parameters(m) < fctn) ++below;
          }
        }
      }
    }
  }
  return {mismatches == 0 && below == compared,
          std::to_string(mismatches) + " count mismatches on 24 grid points, " +
              std::to_string(below) + "/" + std::to_string(compared) +
              " below the FCTN count"};
}

// 7. PSNR spread over mode permutations.
Outcome transposition_invariance() {
  ExperimentPlan plan;
  plan.kind = ExperimentKind::kTransposition;
  plan.root_seed = 1;
  plan.shape = {12, 12, 12};
  plan.planted_rank = RankMatrix::uniform(3, 2, 2);
  plan.nonnegative = false;
  plan.noise_sd = 1e-3;
  plan.missing_rate = 0.8;
  plan.solver.maxit = 300;
  plan.solver.tol = 1e-6;
  std::map<std::string, std::pair<double, double>> range;
  for (const auto& row : run_experiment(plan)) {
    auto [it, fresh] = range.try_emplace(row.solver, row.psnr, row.psnr);
    if (!fresh) {
      it->second.first = std::min(it->second.first, row.psnr);
      it->second.second = std::max(it->second.second, row.psnr);
    }
  }
  bool ok = range.size() == 3;
  std::string detail = "spread (tol 1.0 dB):";
  for (const auto& [solver, mm] : range) {
    const double spread = mm.second - mm.first;
    ok = ok && spread <= 1.0;
    detail += " " + solver + " " + fmt("%.3f", spread) + " dB";
  }
  return {ok, detail};
}

// 8. Adaptive-rank trace.
Outcome adaptive_rank() {
  const auto& inst = recovery_instance();
  const auto cap = RankMatrix::uniform(3, 3, 8);
  auto c = recovery_config(cap);
  c.tau = 0.1;
  const auto r = run_lmtn_ar(inst.planted.tensor, inst.mask, c);
  RankMatrix prev = ar_initial_rank(cap, inst.planted.tensor.shape());
  bool monotone = true;
  for (const auto& rec : r.report.iterations) {
    monotone = monotone && prev.entrywise_le(rec.rank) && rec.rank.entrywise_le(cap);
    prev = rec.rank;
  }
  const double err = rse(r.x, inst.planted.clean);

  const auto fixed = RankMatrix::uniform(3, 2, 2);
  const auto a = run_lmtn_ar(inst.planted.tensor, inst.mask, recovery_config(fixed));
  const auto s = run_lmtn_svd(inst.planted.tensor, inst.mask, recovery_config(fixed));
  bool same = a.report.iterations.size() == s.report.iterations.size();
  for (std::size_t i = 0; same && i < a.report.iterations.size(); ++i) {
    same = a.report.iterations[i].objective == s.report.iterations[i].objective &&
           a.report.iterations[i].rel_change == s.report.iterations[i].rel_change;
  }
  same = same && a.x == s.x;
  return {monotone && err <= 1e-2 && same,
          std::string(monotone ? "monotone" : "NOT monotone") +
              " rank trace ending at " + prev.to_string() + ", RSE " +
              fmt("%.3g", err) + " (tol 1e-2), fixed-rank trace " +
              (same ? "identical" : "differs") + " to SVD"};
}

// 9. Completion gain over the zero-filled observation.
Outcome completion_gain() {
  const Shape shape{36, 36, 3, 8};
  const std::uint64_t seed = 5;
  RankMatrix planted = RankMatrix::uniform(4, 2, 1);
  RankMatrix cap = RankMatrix::uniform(4, 3, 1);
  const std::size_t diag[4] = {4, 4, 3, 4};
  for (std::size_t n = 0; n < 4; ++n) {
    planted.set(n, n, diag[n]);
    cap.set(n, n, std::min(shape[n], diag[n] + 2));
  }
  const auto p = make_planted(shape, planted, seed, true);
  const auto mask = sample_mask(shape, 0.8, seed + 1);
  const double base = psnr(project(p.tensor, mask), p.clean);
  bool ok = true;
  std::string detail = "zero-fill " + fmt("%.2f", base) + " dB; gains (tol 10 dB):";
  for (auto kind : {SolverKind::kPam, SolverKind::kSvd, SolverKind::kAr}) {
    SolverConfig c;
    c.rank = kind == SolverKind::kAr ? cap : planted;
    c.seed = seed + 2;
    c.maxit = 300;
    c.tol = 1e-6;
    const auto r = run_solver(kind, p.tensor, mask, c);
    const double gain = psnr(r.x, p.clean) - base;
    ok = ok && r.report.termination != Termination::kError && gain >= 10.0;
    detail += " " + to_string(kind) + " " + fmt("%.2f", gain);
  }
  return {ok, detail};
}

// 10. SVD sweeps are cheaper than PAM sweeps.
Outcome speed_ordering() {
  const auto& inst = recovery_instance();
  auto c = recovery_config(inst.rank);
  c.maxit = 50;
  c.tol = std::numeric_limits<double>::min();
  double best_svd = std::numeric_limits<double>::infinity();
  double best_pam = best_svd;
  std::size_t svd_sweeps = 0;
  std::size_t pam_sweeps = 0;
  for (int rep = 0; rep < 5; ++rep) {
    auto t0 = std::chrono::steady_clock::now();
    svd_sweeps = run_lmtn_svd(inst.planted.tensor, inst.mask, c).report.iterations.size();
    best_svd = std::min(best_svd, seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    pam_sweeps = run_lmtn_pam(inst.planted.tensor, inst.mask, c).report.iterations.size();
    best_pam = std::min(best_pam, seconds_since(t0));
  }
  return {svd_sweeps == pam_sweeps && best_svd < best_pam,
          "svd " + fmt("%.1f", best_svd * 1e3) + " ms vs pam " +
              fmt("%.1f", best_pam * 1e3) + " ms at " +
              std::to_string(svd_sweeps) + "/" + std::to_string(pam_sweeps) +
              " sweeps (best of 5)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 11. Tensor files and CLI runs are reproducible.
Outcome io_determinism() {
  const fs::path dir = fs::temp_directory_path() / "lmtn_acceptance_io";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 gen(1011);
  const auto x = testing::random_tensor({7, 5, 3, 2}, gen);
  write_tensor(x, dir / "x.lmtn");
  const auto bytes = read_file_bytes(dir / "x.lmtn");
  const auto y = read_tensor(dir / "x.lmtn");
  write_tensor(y, dir / "y.lmtn");
  const bool round_trip = y == x && read_file_bytes(dir / "y.lmtn") == bytes;

  const std::string cfg = (dir / "run.json").string();
  std::ofstream(cfg) << "{\"solver\": \"pam\", \"rank\": [[3,2,2],[2,3,2],[2,2,3]],"
                        " \"shape\": [10, 10, 10], \"seed\": 11, \"maxit\": 40,"
                        " \"missing_rate\": 0.6, \"input\": \""
                     << (dir / "t.lmtn").string() << "\", \"output\": \""
                     << (dir / "out").string() << "\"}";
  bool runs_ok = cli::cli_main({"lmtn", "gen", "-c", cfg}) == cli::kExitOk;
  runs_ok = runs_ok && cli::cli_main({"lmtn", "complete", "-c", cfg, "--no-timing"}) == cli::kExitOk;
  const std::string first = slurp(dir / "out_metrics.csv");
  runs_ok = runs_ok && cli::cli_main({"lmtn", "complete", "-c", cfg, "--no-timing"}) == cli::kExitOk;
  const std::string second = slurp(dir / "out_metrics.csv");
  const bool same = runs_ok && !first.empty() && first == second;
  fs::remove_all(dir);
  return {round_trip && same,
          std::string("tensor round trip ") + (round_trip ? "byte-identical" : "differs") +
              ", repeated run CSV " + (same ? "identical" : "differs") + " (" +
              std::to_string(first.size()) + " bytes)"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "compose oracle", 5, compose_oracle},
      {2, "transformation round trip", 5, transformation_round_trip},
      {3, "unfolding identity", 10, unfolding_identity},
      {4, "svd monotone recovery", 60, svd_monotone_recovery},
      {5, "pam proximal decrease", 120, pam_proximal_decrease},
      {6, "parameter counts", 1, parameter_counts},
      {7, "transposition invariance", 120, transposition_invariance},
      {8, "adaptive rank", 120, adaptive_rank},
      {9, "completion gain", 120, completion_gain},
      {10, "speed ordering", std::numeric_limits<double>::infinity(), speed_ordering},
      {11, "io and determinism", 5, io_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string limit = std::isinf(c.limit_s) ? "none" : fmt("%.0f s", c.limit_s);
    std::printf("%s [%d] %s: %s; %.2f s (limit %s)\n", pass ? "PASS" : "FAIL",
                c.id, c.name, o.detail.c_str(), secs, limit.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
