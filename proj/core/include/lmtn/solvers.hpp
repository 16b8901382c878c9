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


#ifndef LMTN_SOLVERS_HPP_
#define LMTN_SOLVERS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lmtn/mask.hpp"
#include "lmtn/model.hpp"
#include "lmtn/tensor.hpp"

namespace lmtn {

enum class SolverKind { kPam, kSvd, kAr };

std::string to_string(SolverKind kind);
SolverKind solver_from_string(const std::string& name);

enum class Termination { kTolerance, kMaxIterations, kError };

std::string to_string(Termination t);

struct IterationRecord {
  int iter = 0;
  // 1/2 ||X - LMTN(model)||_F^2 after the X update.
  double objective = 0.0;
  // ||X(s) - X(s-1)||_F / ||X(s-1)||_F.
  double rel_change = 0.0;
  // Observed-entry relative residual ||P(LMTN - T)|| / ||P(T)||.
  double rel_error = 0.0;
  RankMatrix rank;
  double wall_ms = 0.0;
};

// One block step of the proximal scheme: objective before and after the step
// plus the proximal term (rho/2)||new - old||^2. The decrease property is
// f_after + proximal <= f_before.
struct BlockStep {
  int iter = 0;
  std::size_t mode = 0;
  char block = 'M';  // 'M', 'G' or 'X'
  double f_before = 0.0;
  double f_after = 0.0;
  double proximal = 0.0;

  double slack() const { return f_before - (f_after + proximal); }
};

struct SolverReport {
  SolverKind solver = SolverKind::kSvd;
  std::vector<IterationRecord> iterations;
  std::vector<BlockStep> block_steps;
  Termination termination = Termination::kMaxIterations;
  std::string error;
  // Ridge escalations performed by solve_spd across the run.
  int ridge_escalations = 0;
  double total_ms = 0.0;
};

struct SolverConfig {
  double rho = 0.1;
  double tau = 0.1;
  double alpha = 0.1;
  double tol = 1e-6;
  int maxit = 300;
  // Fixed rank for PAM/SVD; rank cap R_max for AR.
  RankMatrix rank;
  std::uint64_t seed = 0;
  // Record objective values around every block update (PAM only). Costs one
  // composition per block.
  bool track_block_steps = false;
  // Called after each sweep with the record, the current X and the current
  // model composition.
  std::function<void(const IterationRecord&, const DenseTensor& x,
                     const DenseTensor& z)>
      on_iteration;

  void validate(SolverKind kind, const Shape& shape) const;
};

struct SolverResult {
  LmtnModel model;
  DenseTensor x;
  SolverReport report;
};

// 1/2 ||x - lmtn_compose(model)||_F^2.
double objective(const DenseTensor& x, const LmtnModel& model);

// Counters threaded through the block updates.
struct KernelStats {
  int ridge_escalations = 0;
};

// Proximal least-squares update of latent matrix k.
Matrix pam_update_M(std::size_t k, const DenseTensor& x,
                    const LmtnModel& model, double rho,
                    KernelStats* stats = nullptr);

// Proximal update of core k through the Sylvester equation
//   rho M* G + G (Y Y^T) = M* [rho G_old + M_k^T X_(k) Y^T],
// M* = (M_k^T M_k)^{-1}. Requires rho > 0.
DenseTensor pam_update_G(std::size_t k, const DenseTensor& x,
                         const LmtnModel& model, double rho,
                         KernelStats* stats = nullptr);

// Observed entries from t; the rest (compose + rho x_prev) / (1 + rho).
DenseTensor pam_update_X(const DenseTensor& x_prev, const DenseTensor& t,
                         const ObservationMask& mask, const LmtnModel& model,
                         double rho);

// X projected by M_j^T on every mode j != k.
DenseTensor svd_compute_B(std::size_t k, const DenseTensor& x,
                          const LmtnModel& model);

// Leading r_kk left singular vectors of (B_k)_(k).
Matrix svd_update_M(std::size_t k, const DenseTensor& b_k, std::size_t r_kk);

enum class CoreSolveForm { kPseudoInverse, kNormalEquations };

// (G_k)_(k) = M_k^T (B_k)_(k) G_(!=k)^+, or the normal-equation form
// M_k^T B G^T (G G^T)^{-1}.
DenseTensor svd_update_G(std::size_t k, const DenseTensor& x,
                         const LmtnModel& model,
                         CoreSolveForm form = CoreSolveForm::kPseudoInverse);
DenseTensor svd_update_G_from_B(
    std::size_t k, const DenseTensor& b_k, const LmtnModel& model,
    CoreSolveForm form = CoreSolveForm::kPseudoInverse,
    KernelStats* stats = nullptr);

// Observed entries from t; the rest from the composition.
DenseTensor svd_update_X(const DenseTensor& t, const ObservationMask& mask,
                         const LmtnModel& model);

// |eps_new - eps_old| > tau |eps_old - tol|.
bool ar_should_increase(double eps_new, double eps_old, double tol,
                        double tau);

// One gradient step on 1/2 (r_target - r)^2: r + alpha (r_target - r).
double ar_update_diag_rank(double r_cur, double r_target, double alpha);

// Grows the model to new_rank. Existing entries are kept bit-for-bit; new
// slices are Gaussian with standard deviation 0.1x that of the node's
// existing entries.
LmtnModel ar_expand_model(const LmtnModel& model, const RankMatrix& new_rank,
                          std::uint64_t seed);

// The three drivers. `t` only needs valid values on observed entries. When
// `initial` is given it replaces the seeded random initialization (for AR it
// must carry the starting ranks). Kernel failures do not throw: the result
// carries the partial report with Termination::kError.
SolverResult run_lmtn_pam(const DenseTensor& t, const ObservationMask& mask,
                          const SolverConfig& config,
                          std::optional<LmtnModel> initial = std::nullopt);
SolverResult run_lmtn_svd(const DenseTensor& t, const ObservationMask& mask,
                          const SolverConfig& config,
                          std::optional<LmtnModel> initial = std::nullopt);
SolverResult run_lmtn_ar(const DenseTensor& t, const ObservationMask& mask,
                         const SolverConfig& config,
                         std::optional<LmtnModel> initial = std::nullopt);

SolverResult run_solver(SolverKind kind, const DenseTensor& t,
                        const ObservationMask& mask, const SolverConfig& config,
                        std::optional<LmtnModel> initial = std::nullopt);

// Starting ranks of the adaptive solver: 2 everywhere, capped by rank_max.
RankMatrix ar_initial_rank(const RankMatrix& rank_max, const Shape& shape);

}  // namespace lmtn

#endif  // LMTN_SOLVERS_HPP_
