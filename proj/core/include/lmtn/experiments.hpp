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


#ifndef LMTN_EXPERIMENTS_HPP_
#define LMTN_EXPERIMENTS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lmtn/mask.hpp"
#include "lmtn/model.hpp"
#include "lmtn/solvers.hpp"
#include "lmtn/tensor.hpp"

namespace lmtn {

// splitmix64 step: decorrelated child seeds from one root.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

struct PlantedInstance {
  LmtnModel model;    // composes exactly to `clean`
  DenseTensor clean;  // max |entry| = 1
  DenseTensor tensor; // clean plus optional Gaussian noise
};

// Random model of the given ranks, rescaled so that its composition has
// max |entry| = 1. With `nonnegative`, cores and matrices are drawn from
// U(0, 1) and the tensor lies in [0, 1].
PlantedInstance make_planted(const Shape& shape, const RankMatrix& rank,
                             std::uint64_t seed, bool nonnegative = true,
                             double noise_sd = 0.0);

enum class ExperimentKind { kTauSweep, kTransposition, kCompression,
                            kCompletionGrid };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

struct ExperimentPlan {
  ExperimentKind kind = ExperimentKind::kCompletionGrid;
  std::uint64_t root_seed = 0;
  Shape shape{12, 12, 12};
  RankMatrix planted_rank = RankMatrix::uniform(3, 2, 4);
  // Fixed rank for PAM/SVD and R_max for AR. Defaults to planted_rank.
  RankMatrix solve_rank;
  bool nonnegative = true;
  double noise_sd = 0.0;
  double missing_rate = 0.8;
  SolverConfig solver;
  std::vector<SolverKind> solvers{SolverKind::kPam, SolverKind::kSvd,
                                  SolverKind::kAr};
};

struct ExperimentRow {
  std::string experiment;
  std::size_t cell = 0;
  std::string solver;
  // tau, permutation, "R1=..,R2=.." or missing rate, depending on the kind.
  std::string setting;
  RankMatrix rank;
  double cr = 0.0;
  double rse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  // PSNR of the zero-filled observation against the clean tensor.
  double observed_psnr = 0.0;
  int iterations = 0;
  std::string termination;
  double wall_ms = 0.0;
};

// tau-sweep: AR over tau = 0.1..0.9. transposition: every mode permutation
// for each solver, starting from the permuted base initialization.
// compression: SVD on the fully observed tensor over R1 in {1,2,3} and
// R2 in {2,3,4}. completion-grid: each solver at missing rates
// {0.5, 0.6, 0.7, 0.8}. Rows come back in cell order.
std::vector<ExperimentRow> run_experiment(const ExperimentPlan& plan);

std::string experiment_csv_header();
std::string experiment_csv_row(const ExperimentRow& row);

}  // namespace lmtn

#endif  // LMTN_EXPERIMENTS_HPP_
