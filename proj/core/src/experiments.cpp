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


#include "lmtn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "lmtn/error.hpp"
#include "lmtn/metrics.hpp"

namespace lmtn {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
  std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PlantedInstance make_planted(const Shape& shape, const RankMatrix& rank,
                             std::uint64_t seed, bool nonnegative,
                             double noise_sd) {
  PlantedInstance p;
  if (nonnegative) {
    validate_rank_matrix(rank, shape);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    p.model.shape = shape;
    p.model.rank = rank;
    for (std::size_t k = 0; k < shape.size(); ++k) {
      DenseTensor core(core_shape(rank, k));
      for (double& v : core.data()) v = unit(gen);
      p.model.cores.push_back(std::move(core));
    }
    for (std::size_t k = 0; k < shape.size(); ++k) {
      Matrix m(static_cast<Eigen::Index>(shape[k]),
               static_cast<Eigen::Index>(rank(k, k)));
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = unit(gen);
      }
      p.model.mats.push_back(std::move(m));
    }
  } else {
    p.model = init_random_model(shape, rank, seed);
  }
  const DenseTensor raw = lmtn_compose(p.model);
  double peak = 0.0;
  for (double v : raw.data()) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw NumericalError("planted model composes to zero");
  p.model.cores[0] *= 1.0 / peak;
  p.clean = lmtn_compose(p.model);
  p.tensor = p.clean;
  if (noise_sd > 0.0) {
    std::mt19937_64 gen(derive_seed(seed, 0xA5));
    std::normal_distribution<double> normal(0.0, noise_sd);
    for (double& v : p.tensor.data()) v += normal(gen);
  }
  return p;
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTauSweep:
      return "tau-sweep";
    case ExperimentKind::kTransposition:
      return "transposition";
    case ExperimentKind::kCompression:
      return "compression";
    case ExperimentKind::kCompletionGrid:
      return "completion-grid";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::kTauSweep, ExperimentKind::kTransposition,
                 ExperimentKind::kCompression,
                 ExperimentKind::kCompletionGrid}) {
    if (to_string(k) == name) return k;
  }
  throw FormatError("unknown experiment \"" + name +
                    "\" (expected tau-sweep|transposition|compression|"
                    "completion-grid)");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

ExperimentRow score(const ExperimentPlan& plan, std::size_t cell,
                    SolverKind kind, std::string setting,
                    const SolverResult& result, const DenseTensor& estimate,
                    const DenseTensor& clean, const DenseTensor& observed) {
  ExperimentRow row;
  row.experiment = to_string(plan.kind);
  row.cell = cell;
  row.solver = to_string(kind);
  row.setting = std::move(setting);
  row.rank = result.model.rank;
  row.cr = compression_ratio(result.model, clean.shape());
  row.rse = rse(estimate, clean);
  row.psnr = psnr(estimate, clean);
  row.ssim = ssim(estimate, clean);
  row.observed_psnr = psnr(observed, clean);
  row.iterations = static_cast<int>(result.report.iterations.size());
  row.termination = to_string(result.report.termination);
  row.wall_ms = result.report.total_ms;
  return row;
}

std::string perm_label(const std::vector<std::size_t>& perm) {
  std::string s;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(perm[i]);
  }
  return s;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentPlan& plan) {
  const RankMatrix solve_rank =
      plan.solve_rank.order() == 0 ? plan.planted_rank : plan.solve_rank;
  validate_rank_matrix(solve_rank, plan.shape);
  const PlantedInstance planted =
      make_planted(plan.shape, plan.planted_rank,
                   derive_seed(plan.root_seed, 0), plan.nonnegative,
                   plan.noise_sd);
  const std::uint64_t init_seed = derive_seed(plan.root_seed, 1);

  std::vector<ExperimentRow> rows;
  std::size_t cell = 0;
  auto config_for = [&](const RankMatrix& rank) {
    SolverConfig c = plan.solver;
    c.rank = rank;
    c.seed = init_seed;
    c.on_iteration = nullptr;
    c.track_block_steps = false;
    return c;
  };

  switch (plan.kind) {
    case ExperimentKind::kTauSweep: {
      const ObservationMask mask = sample_mask(
          plan.shape, plan.missing_rate, derive_seed(plan.root_seed, 2));
      const DenseTensor observed = project(planted.tensor, mask);
      for (int i = 1; i <= 9; ++i) {
        SolverConfig c = config_for(solve_rank);
        c.tau = 0.1 * i;
        const auto result = run_lmtn_ar(planted.tensor, mask, c);
        rows.push_back(score(plan, cell++, SolverKind::kAr,
                             format_double(c.tau), result, result.x,
                             planted.clean,
                             observed));
      }
      break;
    }
    case ExperimentKind::kTransposition: {
      const ObservationMask mask = sample_mask(
          plan.shape, plan.missing_rate, derive_seed(plan.root_seed, 2));
      std::vector<std::size_t> perm(plan.shape.size());
      for (SolverKind kind : plan.solvers) {
        const RankMatrix base_rank = kind == SolverKind::kAr
                                         ? ar_initial_rank(solve_rank, plan.shape)
                                         : solve_rank;
        const LmtnModel base = init_random_model(plan.shape, base_rank, init_seed);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        do {
          const DenseTensor t = generalized_transpose(planted.tensor, perm);
          const DenseTensor clean = generalized_transpose(planted.clean, perm);
          const ObservationMask m = mask.transposed(perm);
          const auto result =
              run_solver(kind, t, m, config_for(permute_rank(solve_rank, perm)),
                         permute_model(base, perm));
          rows.push_back(score(plan, cell++, kind, perm_label(perm), result,
                               result.x, clean, project(t, m)));
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
      break;
    }
    case ExperimentKind::kCompression: {
      const ObservationMask full(plan.shape, true);
      const std::size_t n = plan.shape.size();
      const std::size_t min_dim =
          *std::min_element(plan.shape.begin(), plan.shape.end());
      for (std::size_t r1 : {1, 2, 3}) {
        for (std::size_t r2 : {2, 3, 4}) {
          const RankMatrix r =
              RankMatrix::uniform(n, r1, std::min(r2, min_dim));
          const auto result =
              run_lmtn_svd(planted.tensor, full, config_for(r));
          rows.push_back(score(plan, cell++, SolverKind::kSvd,
                               "R1=" + std::to_string(r1) +
                                   " R2=" + std::to_string(r2),
                               result, lmtn_compose(result.model),
                               planted.clean, planted.tensor));
        }
      }
      break;
    }
    case ExperimentKind::kCompletionGrid: {
      std::size_t rate_index = 0;
      for (double rate : {0.5, 0.6, 0.7, 0.8}) {
        const ObservationMask mask = sample_mask(
            plan.shape, rate, derive_seed(plan.root_seed, 100 + rate_index++));
        const DenseTensor observed = project(planted.tensor, mask);
        for (SolverKind kind : plan.solvers) {
          const auto result =
              run_solver(kind, planted.tensor, mask, config_for(solve_rank));
          rows.push_back(score(plan, cell++, kind, format_double(rate), result,
                               result.x, planted.clean, observed));
        }
      }
      break;
    }
  }
  return rows;
}

std::string experiment_csv_header() {
  return "experiment,cell,solver,setting,rank,cr,rse,psnr,ssim,"
         "observed_psnr,iterations,termination,wall_ms";
}

std::string experiment_csv_row(const ExperimentRow& row) {
  std::string s = row.experiment;
  s += ',' + std::to_string(row.cell);
  s += ',' + row.solver;
  s += ',' + row.setting;
  s += ',' + row.rank.to_string();
  for (double v : {row.cr, row.rse, row.psnr, row.ssim, row.observed_psnr}) {
    s += ',' + format_double(v);
  }
  s += ',' + std::to_string(row.iterations);
  s += ',' + row.termination;
  s += ',' + format_double(row.wall_ms);
  return s;
}

}  // namespace lmtn
