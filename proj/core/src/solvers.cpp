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


#include "lmtn/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "lmtn/error.hpp"
#include "lmtn/linalg.hpp"

namespace lmtn {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kPam:
      return "pam";
    case SolverKind::kSvd:
      return "svd";
    case SolverKind::kAr:
      return "ar";
  }
  return "unknown";
}

SolverKind solver_from_string(const std::string& name) {
  if (name == "pam") return SolverKind::kPam;
  if (name == "svd") return SolverKind::kSvd;
  if (name == "ar") return SolverKind::kAr;
  throw FormatError("unknown solver \"" + name + "\" (expected pam|svd|ar)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kTolerance:
      return "tol";
    case Termination::kMaxIterations:
      return "maxit";
    case Termination::kError:
      return "error";
  }
  return "unknown";
}

void SolverConfig::validate(SolverKind kind, const Shape& shape) const {
  if (!(tol > 0.0)) throw ShapeError("tol must be positive");
  if (maxit < 1) throw ShapeError("maxit must be >= 1");
  if (kind == SolverKind::kPam && !(rho > 0.0 && std::isfinite(rho))) {
    throw ShapeError("rho must be positive and finite for PAM");
  }
  if (kind == SolverKind::kAr) {
    if (!(tau > 0.0 && tau < 1.0)) throw ShapeError("tau must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw ShapeError("alpha must lie in (0, 1]");
    }
  }
  validate_rank_matrix(rank, shape);
}

double objective(const DenseTensor& x, const LmtnModel& model) {
  if (x.shape() != model.shape) {
    throw ShapeError("objective: tensor and model shapes differ");
  }
  return 0.5 * squared_norm(x - lmtn_compose(model));
}

namespace {

void check_mode_index(std::size_t k, const LmtnModel& model) {
  if (k >= model.order()) throw ShapeError("mode index out of range");
}

void add_stats(KernelStats* stats, int escalations) {
  if (stats != nullptr) stats->ridge_escalations += escalations;
}

double squared_distance(const Matrix& a, const Matrix& b) {
  return (a - b).squaredNorm();
}

// P(T) + P'(z): observed entries from t, the rest from z.
DenseTensor merge_observed(const DenseTensor& t, const ObservationMask& mask,
                           DenseTensor z) {
  if (t.shape() != mask.shape() || z.shape() != t.shape()) {
    throw ShapeError("tensor, mask and model shapes differ");
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (mask.observed(i)) z[i] = t[i];
  }
  return z;
}

double observed_relative_error(const DenseTensor& t,
                               const ObservationMask& mask,
                               const DenseTensor& z) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!mask.observed(i)) continue;
    const double d = z[i] - t[i];
    num += d * d;
    den += t[i] * t[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

double relative_change(const DenseTensor& now, const DenseTensor& prev) {
  const double base = frobenius_norm(prev);
  const double diff = frobenius_norm(now - prev);
  if (base == 0.0) {
    return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return diff / base;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since)
      .count();
}

}  // namespace

Matrix pam_update_M(std::size_t k, const DenseTensor& x,
                    const LmtnModel& model, double rho, KernelStats* stats) {
  check_mode_index(k, model);
  if (rho < 0.0) throw ShapeError("rho must be non-negative");
  const auto nodes = latent_nodes(model);
  const Matrix y = subchain_unfold_excluding(nodes, k);
  const Matrix q = mode_n_unfold(model.cores[k], k) * y;
  const Matrix xk = mode_n_unfold(x, k);

  Matrix lhs = q * q.transpose();
  lhs.diagonal().array() += rho;
  const Matrix rhs = rho * model.mats[k] + xk * q.transpose();
  SpdSolution sol = solve_spd(lhs, rhs.transpose());
  add_stats(stats, sol.escalations);
  return sol.x.transpose();
}

DenseTensor pam_update_G(std::size_t k, const DenseTensor& x,
                         const LmtnModel& model, double rho,
                         KernelStats* stats) {
  check_mode_index(k, model);
  if (!(rho > 0.0)) throw ShapeError("pam_update_G requires rho > 0");
  const auto nodes = latent_nodes(model);
  const Matrix y = subchain_unfold_excluding(nodes, k);
  const Matrix& m = model.mats[k];
  const Matrix g_old = mode_n_unfold(model.cores[k], k);
  const Matrix xk = mode_n_unfold(x, k);

  const Matrix gram = m.transpose() * m;
  const auto r = gram.rows();
  SpdSolution m_star = solve_spd(gram, Matrix::Identity(r, r));
  add_stats(stats, m_star.escalations);
  SpdSolution rhs = solve_spd(
      gram + m_star.ridge * Matrix::Identity(r, r),
      rho * g_old + m.transpose() * xk * y.transpose());
  add_stats(stats, rhs.escalations);

  Matrix a = rho * m_star.x;
  a = 0.5 * (a + a.transpose()).eval();
  const Matrix b = y * y.transpose();
  const Matrix g_new = sylvester_solve(a, b, rhs.x);
  return mode_n_fold(g_new, k, model.cores[k].shape());
}

DenseTensor pam_update_X(const DenseTensor& x_prev, const DenseTensor& t,
                         const ObservationMask& mask, const LmtnModel& model,
                         double rho) {
  DenseTensor z = lmtn_compose(model);
  if (x_prev.shape() != z.shape()) {
    throw ShapeError("pam_update_X: shapes differ");
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = (z[i] + rho * x_prev[i]) / (1.0 + rho);
  }
  return merge_observed(t, mask, std::move(z));
}

DenseTensor svd_compute_B(std::size_t k, const DenseTensor& x,
                          const LmtnModel& model) {
  check_mode_index(k, model);
  if (x.shape() != model.shape) {
    throw ShapeError("svd_compute_B: tensor and model shapes differ");
  }
  DenseTensor b = x;
  for (std::size_t j = 0; j < model.order(); ++j) {
    if (j == k) continue;
    b = mode_n_product(b, model.mats[j].transpose(), j);
  }
  return b;
}

Matrix svd_update_M(std::size_t k, const DenseTensor& b_k, std::size_t r_kk) {
  const Matrix bk = mode_n_unfold(b_k, k);
  return leading_left_singular_vectors(bk, r_kk);
}

DenseTensor svd_update_G_from_B(std::size_t k, const DenseTensor& b_k,
                                const LmtnModel& model, CoreSolveForm form,
                                KernelStats* stats) {
  check_mode_index(k, model);
  const Matrix bk = mode_n_unfold(b_k, k);
  const Matrix g_rest = subchain_unfold_excluding(model.cores, k);
  const Matrix w = model.mats[k].transpose() * bk;
  if (w.cols() != g_rest.cols()) {
    throw ShapeError("svd_update_G: projected tensor does not match the "
                     "latent ranks");
  }
  Matrix g_new;
  if (form == CoreSolveForm::kPseudoInverse) {
    g_new = w * pseudo_inverse(g_rest);
  } else {
    SpdSolution sol = solve_spd(g_rest * g_rest.transpose(),
                                g_rest * w.transpose());
    add_stats(stats, sol.escalations);
    g_new = sol.x.transpose();
  }
  return mode_n_fold(g_new, k, model.cores[k].shape());
}

DenseTensor svd_update_G(std::size_t k, const DenseTensor& x,
                         const LmtnModel& model, CoreSolveForm form) {
  return svd_update_G_from_B(k, svd_compute_B(k, x, model), model, form);
}

DenseTensor svd_update_X(const DenseTensor& t, const ObservationMask& mask,
                         const LmtnModel& model) {
  return merge_observed(t, mask, lmtn_compose(model));
}

bool ar_should_increase(double eps_new, double eps_old, double tol,
                        double tau) {
  return std::abs(eps_new - eps_old) > tau * std::abs(eps_old - tol);
}

double ar_update_diag_rank(double r_cur, double r_target, double alpha) {
  // grad of 1/2 (r_target - r)^2 is -(r_target - r)
  const double grad = -(r_target - r_cur);
  return r_cur - alpha * grad;
}

LmtnModel ar_expand_model(const LmtnModel& model, const RankMatrix& new_rank,
                          std::uint64_t seed) {
  validate_rank_matrix(new_rank, model.shape);
  if (!model.rank.entrywise_le(new_rank)) {
    throw ShapeError("ar_expand_model: ranks may only grow");
  }
  if (new_rank == model.rank) return model;

  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto fill_scale = [](std::span<const double> v) {
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double e : v) var += (e - mean) * (e - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    return 0.1 * (sd > 0.0 ? sd : 1.0);
  };

  LmtnModel out;
  out.shape = model.shape;
  out.rank = new_rank;
  for (std::size_t k = 0; k < model.order(); ++k) {
    const DenseTensor& old = model.cores[k];
    DenseTensor grown(core_shape(new_rank, k));
    const double scale = fill_scale(old.data());
    for (std::size_t i = 0; i < grown.size(); ++i) {
      const auto idx = grown.multi_index(i);
      bool inside = true;
      for (std::size_t m = 0; m < idx.size(); ++m) {
        inside = inside && idx[m] < old.dim(m);
      }
      grown[i] = inside ? old(idx) : scale * normal(gen);
    }
    out.cores.push_back(std::move(grown));
  }
  for (std::size_t k = 0; k < model.order(); ++k) {
    const Matrix& old = model.mats[k];
    const auto cols = static_cast<Eigen::Index>(new_rank(k, k));
    Matrix grown(old.rows(), cols);
    grown.leftCols(old.cols()) = old;
    const double scale = fill_scale({old.data(), static_cast<std::size_t>(old.size())});
    for (Eigen::Index j = old.cols(); j < cols; ++j) {
      for (Eigen::Index i = 0; i < old.rows(); ++i) {
        grown(i, j) = scale * normal(gen);
      }
    }
    out.mats.push_back(std::move(grown));
  }
  return out;
}

RankMatrix ar_initial_rank(const RankMatrix& rank_max, const Shape& shape) {
  validate_rank_matrix(rank_max, shape);
  RankMatrix r(rank_max.order());
  for (std::size_t i = 0; i < r.order(); ++i) {
    for (std::size_t j = i; j < r.order(); ++j) {
      std::size_t v = std::min<std::size_t>(2, rank_max(i, j));
      if (i == j) v = std::min(v, shape[i]);
      r.set(i, j, v);
    }
  }
  return r;
}

namespace {

struct RunState {
  LmtnModel model;
  DenseTensor x;
  DenseTensor z;  // composition of the current model
  SolverReport report;
  KernelStats stats;
};

RunState start_run(SolverKind kind, const DenseTensor& t,
                   const ObservationMask& mask, const RankMatrix& rank,
                   const SolverConfig& config,
                   std::optional<LmtnModel> initial) {
  if (t.shape() != mask.shape()) {
    throw ShapeError("observed tensor and mask shapes differ");
  }
  RunState st;
  st.report.solver = kind;
  if (initial) {
    initial->validate();
    if (initial->shape != t.shape()) {
      throw ShapeError("initial model shape differs from the tensor");
    }
    st.model = std::move(*initial);
  } else {
    st.model = init_random_model(t.shape(), rank, config.seed);
  }
  st.x = project(t, mask);
  st.z = lmtn_compose(st.model);
  return st;
}

// Shared bookkeeping after the X update; returns true when converged.
bool finish_sweep(RunState& st, int iter, DenseTensor x_new, DenseTensor z_new,
                  const DenseTensor& t, const ObservationMask& mask,
                  const SolverConfig& config, Clock::time_point sweep_start) {
  IterationRecord rec;
  rec.iter = iter;
  rec.rel_change = relative_change(x_new, st.x);
  const double model_change = relative_change(z_new, st.z);
  st.x = std::move(x_new);
  st.z = std::move(z_new);
  rec.objective = 0.5 * squared_norm(st.x - st.z);
  rec.rel_error = observed_relative_error(t, mask, st.z);
  rec.rank = st.model.rank;
  rec.wall_ms = elapsed_ms(sweep_start);
  if (!std::isfinite(rec.objective)) {
    throw NumericalError("objective became non-finite at iteration " +
                         std::to_string(iter));
  }
  st.report.iterations.push_back(rec);
  if (config.on_iteration) config.on_iteration(rec, st.x, st.z);
  return std::max(rec.rel_change, model_change) < config.tol;
}

SolverResult finish_run(RunState st, Clock::time_point run_start) {
  st.report.ridge_escalations = st.stats.ridge_escalations;
  st.report.total_ms = elapsed_ms(run_start);
  return SolverResult{std::move(st.model), std::move(st.x),
                      std::move(st.report)};
}

void svd_sweep(RunState& st) {
  for (std::size_t k = 0; k < st.model.order(); ++k) {
    const DenseTensor b = svd_compute_B(k, st.x, st.model);
    st.model.mats[k] = svd_update_M(k, b, st.model.rank(k, k));
    st.model.cores[k] = svd_update_G_from_B(
        k, b, st.model, CoreSolveForm::kPseudoInverse, &st.stats);
  }
}

}  // namespace

SolverResult run_lmtn_pam(const DenseTensor& t, const ObservationMask& mask,
                          const SolverConfig& config,
                          std::optional<LmtnModel> initial) {
  config.validate(SolverKind::kPam, t.shape());
  const auto run_start = Clock::now();
  RunState st = start_run(SolverKind::kPam, t, mask, config.rank, config,
                          std::move(initial));
  const double rho = config.rho;
  try {
    for (int iter = 1; iter <= config.maxit; ++iter) {
      const auto sweep_start = Clock::now();
      double f = config.track_block_steps ? 0.5 * squared_norm(st.x - st.z)
                                          : 0.0;
      for (std::size_t k = 0; k < st.model.order(); ++k) {
        Matrix m_new = pam_update_M(k, st.x, st.model, rho, &st.stats);
        const double prox_m =
            0.5 * rho * squared_distance(m_new, st.model.mats[k]);
        st.model.mats[k] = std::move(m_new);
        if (config.track_block_steps) {
          const double f_after = objective(st.x, st.model);
          st.report.block_steps.push_back({iter, k, 'M', f, f_after, prox_m});
          f = f_after;
        }
        DenseTensor g_new = pam_update_G(k, st.x, st.model, rho, &st.stats);
        const double prox_g =
            0.5 * rho * squared_norm(g_new - st.model.cores[k]);
        st.model.cores[k] = std::move(g_new);
        if (config.track_block_steps) {
          const double f_after = objective(st.x, st.model);
          st.report.block_steps.push_back({iter, k, 'G', f, f_after, prox_g});
          f = f_after;
        }
      }
      DenseTensor z = lmtn_compose(st.model);
      DenseTensor x_new = st.x;
      for (std::size_t i = 0; i < x_new.size(); ++i) {
        x_new[i] = (z[i] + rho * st.x[i]) / (1.0 + rho);
      }
      x_new = merge_observed(t, mask, std::move(x_new));
      if (config.track_block_steps) {
        const double f_before = 0.5 * squared_norm(st.x - z);
        const double f_after = 0.5 * squared_norm(x_new - z);
        const double prox_x = 0.5 * rho * squared_norm(x_new - st.x);
        st.report.block_steps.push_back(
            {iter, st.model.order(), 'X', f_before, f_after, prox_x});
      }
      if (finish_sweep(st, iter, std::move(x_new), std::move(z), t, mask,
                       config, sweep_start)) {
        st.report.termination = Termination::kTolerance;
        break;
      }
    }
  } catch (const NumericalError& e) {
    st.report.termination = Termination::kError;
    st.report.error = e.what();
  }
  return finish_run(std::move(st), run_start);
}

SolverResult run_lmtn_svd(const DenseTensor& t, const ObservationMask& mask,
                          const SolverConfig& config,
                          std::optional<LmtnModel> initial) {
  config.validate(SolverKind::kSvd, t.shape());
  const auto run_start = Clock::now();
  RunState st = start_run(SolverKind::kSvd, t, mask, config.rank, config,
                          std::move(initial));
  try {
    for (int iter = 1; iter <= config.maxit; ++iter) {
      const auto sweep_start = Clock::now();
      svd_sweep(st);
      DenseTensor z = lmtn_compose(st.model);
      DenseTensor x_new = merge_observed(t, mask, z);
      if (finish_sweep(st, iter, std::move(x_new), std::move(z), t, mask,
                       config, sweep_start)) {
        st.report.termination = Termination::kTolerance;
        break;
      }
    }
  } catch (const NumericalError& e) {
    st.report.termination = Termination::kError;
    st.report.error = e.what();
  }
  return finish_run(std::move(st), run_start);
}

SolverResult run_lmtn_ar(const DenseTensor& t, const ObservationMask& mask,
                         const SolverConfig& config,
                         std::optional<LmtnModel> initial) {
  config.validate(SolverKind::kAr, t.shape());
  const RankMatrix& rank_max = config.rank;
  const std::size_t n = t.order();
  const auto run_start = Clock::now();
  RunState st = start_run(SolverKind::kAr, t, mask,
                          ar_initial_rank(rank_max, t.shape()), config,
                          std::move(initial));
  if (!st.model.rank.entrywise_le(rank_max)) {
    throw ShapeError("initial model ranks exceed rank_max");
  }
  std::vector<double> shadow(n);
  for (std::size_t i = 0; i < n; ++i) {
    shadow[i] = static_cast<double>(st.model.rank(i, i));
  }
  double eps_prev = std::numeric_limits<double>::quiet_NaN();
  try {
    for (int iter = 1; iter <= config.maxit; ++iter) {
      const auto sweep_start = Clock::now();
      svd_sweep(st);
      DenseTensor z = lmtn_compose(st.model);
      const double eps = observed_relative_error(t, mask, z);

      bool grew = false;
      RankMatrix next = st.model.rank;
      if (iter > 1 && ar_should_increase(eps, eps_prev, config.tol,
                                         config.tau)) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = i + 1; j < n; ++j) {
            next.set(i, j, std::min(next(i, j) + 1, rank_max(i, j)));
          }
          const double cap =
              static_cast<double>(std::min(rank_max(i, i), t.dim(i)));
          shadow[i] = std::min(
              cap, ar_update_diag_rank(shadow[i], static_cast<double>(rank_max(i, i)),
                                       config.alpha));
          const auto realized = static_cast<std::size_t>(std::floor(shadow[i]));
          next.set(i, i, std::max(next(i, i), std::min(realized, rank_max(i, i))));
        }
      }
      eps_prev = eps;

      DenseTensor x_new = merge_observed(t, mask, z);
      bool converged = finish_sweep(st, iter, std::move(x_new), std::move(z),
                                    t, mask, config, sweep_start);
      if (!(next == st.model.rank)) {
        st.model = ar_expand_model(
            st.model, next,
            config.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(iter)));
        st.z = lmtn_compose(st.model);
        grew = true;
        st.report.iterations.back().rank = st.model.rank;
      }
      if (converged && !grew) {
        st.report.termination = Termination::kTolerance;
        break;
      }
    }
  } catch (const NumericalError& e) {
    st.report.termination = Termination::kError;
    st.report.error = e.what();
  }
  return finish_run(std::move(st), run_start);
}

SolverResult run_solver(SolverKind kind, const DenseTensor& t,
                        const ObservationMask& mask, const SolverConfig& config,
                        std::optional<LmtnModel> initial) {
  switch (kind) {
    case SolverKind::kPam:
      return run_lmtn_pam(t, mask, config, std::move(initial));
    case SolverKind::kSvd:
      return run_lmtn_svd(t, mask, config, std::move(initial));
    case SolverKind::kAr:
      return run_lmtn_ar(t, mask, config, std::move(initial));
  }
  throw ShapeError("unknown solver kind");
}

}  // namespace lmtn
