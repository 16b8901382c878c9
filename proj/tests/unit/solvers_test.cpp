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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "lmtn/error.hpp"
#include "lmtn/experiments.hpp"
#include "lmtn/linalg.hpp"
#include "lmtn/metrics.hpp"
#include "lmtn/solvers.hpp"
#include "oracles.hpp"

namespace lmtn {
namespace {

using testing::max_abs_diff;
using testing::random_matrix;
using testing::random_tensor;

const Shape kShape{5, 4, 6};

LmtnModel test_model(std::uint64_t seed) {
  return init_random_model(kShape, RankMatrix::uniform(3, 2, 3), seed);
}

double direct_objective(const DenseTensor& x, const LmtnModel& m) {
  const auto z = testing::lmtn_oracle(m);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - z[i]) * (x[i] - z[i]);
  return 0.5 * s;
}

TEST(ObjectiveTest, Cases) {
  const auto m = test_model(1);
  EXPECT_LE(objective(lmtn_compose(m), m), 1e-20);
  std::mt19937_64 gen(2);
  const auto x = random_tensor(kShape, gen);
  auto zero = m;
  for (auto& c : zero.cores) c *= 0.0;
  EXPECT_DOUBLE_EQ(objective(x, zero), 0.5 * squared_norm(x));
  EXPECT_NEAR(objective(x, m), direct_objective(x, m), 1e-12);
  EXPECT_THROW(objective(DenseTensor({2, 2}), m), ShapeError);
}

TEST(PamUpdateMTest, LargeRhoKeepsIterate) {
  std::mt19937_64 gen(3);
  const auto m = test_model(4);
  const auto x = random_tensor(kShape, gen);
  const Matrix out = pam_update_M(1, x, m, 1e12);
  EXPECT_LE((out - m.mats[1]).norm(), 1e-6 * m.mats[1].norm());
}

TEST(PamUpdateMTest, ZeroRhoSolvesNormalEquations) {
  std::mt19937_64 gen(5);
  const auto m = test_model(6);
  const auto x = random_tensor(kShape, gen);
  for (std::size_t k = 0; k < 3; ++k) {
    const Matrix out = pam_update_M(k, x, m, 0.0);
    const Matrix q = mode_n_unfold(m.cores[k], k) *
                     subchain_unfold_excluding(latent_nodes(m), k);
    const Matrix grad = (out * q - mode_n_unfold(x, k)) * q.transpose();
    EXPECT_LE(grad.norm(), 1e-8);
  }
}

TEST(PamUpdateMTest, ProximalDecrease) {
  std::mt19937_64 gen(7);
  auto m = test_model(8);
  const auto x = random_tensor(kShape, gen);
  for (double rho : {0.01, 0.1, 1.0}) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double before = objective(x, m);
      const Matrix out = pam_update_M(k, x, m, rho);
      const double prox = 0.5 * rho * (out - m.mats[k]).squaredNorm();
      m.mats[k] = out;
      EXPECT_LE(objective(x, m) + prox, before + 1e-12);
    }
  }
}

TEST(PamUpdateGTest, SolvesTheSylvesterSystem) {
  std::mt19937_64 gen(9);
  const auto m = test_model(10);
  const auto x = random_tensor(kShape, gen);
  const double rho = 0.1;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto g = pam_update_G(k, x, m, rho);
    EXPECT_EQ(g.shape(), m.cores[k].shape());
    const Matrix& mk = m.mats[k];
    const Matrix mstar = (mk.transpose() * mk).inverse();
    const Matrix y = subchain_unfold_excluding(latent_nodes(m), k);
    const Matrix a = rho * mstar;
    const Matrix b = y * y.transpose();
    const Matrix c = mstar * (rho * mode_n_unfold(m.cores[k], k) +
                              mk.transpose() * mode_n_unfold(x, k) * y.transpose());
    EXPECT_LE(sylvester_residual(a, b, c, mode_n_unfold(g, k)), 1e-8);
  }
}

TEST(PamUpdateGTest, LargeRhoKeepsIterateAndDecreases) {
  std::mt19937_64 gen(11);
  auto m = test_model(12);
  const auto x = random_tensor(kShape, gen);
  const auto g = pam_update_G(2, x, m, 1e12);
  EXPECT_LE(frobenius_norm(g - m.cores[2]), 1e-6 * frobenius_norm(m.cores[2]));
  for (double rho : {0.01, 0.1, 1.0}) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double before = objective(x, m);
      auto out = pam_update_G(k, x, m, rho);
      const double prox = 0.5 * rho * squared_norm(out - m.cores[k]);
      m.cores[k] = std::move(out);
      EXPECT_LE(objective(x, m) + prox, before + 1e-12);
    }
  }
  EXPECT_THROW(pam_update_G(0, x, m, 0.0), ShapeError);
}

TEST(PamUpdateXTest, Cases) {
  std::mt19937_64 gen(13);
  const auto m = test_model(14);
  const auto t = random_tensor(kShape, gen);
  const auto prev = random_tensor(kShape, gen);
  const auto z = lmtn_compose(m);
  const auto mask = sample_mask(kShape, 0.5, 15);

  const auto x0 = pam_update_X(prev, t, mask, m, 0.0);
  for (std::size_t i = 0; i < x0.size(); ++i) {
    EXPECT_EQ(x0[i], mask.observed(i) ? t[i] : z[i]);
  }
  EXPECT_EQ(pam_update_X(prev, t, ObservationMask(kShape, true), m, 0.3), t);
  const auto x1 = pam_update_X(prev, t, mask, m, 1.0);
  std::size_t hole = 0;
  while (mask.observed(hole)) ++hole;
  EXPECT_DOUBLE_EQ(x1[hole], (z[hole] + prev[hole]) / 2.0);
}

TEST(SvdComputeBTest, Cases) {
  std::mt19937_64 gen(16);
  const auto x = random_tensor(kShape, gen);
  RankMatrix full = RankMatrix::uniform(3, 2, 1);
  for (std::size_t n = 0; n < 3; ++n) full.set(n, n, kShape[n]);
  auto ident = init_random_model(kShape, full, 1);
  for (std::size_t n = 0; n < 3; ++n) {
    ident.mats[n] = Matrix::Identity(static_cast<Eigen::Index>(kShape[n]),
                                     static_cast<Eigen::Index>(kShape[n]));
  }
  EXPECT_LT(max_abs_diff(svd_compute_B(1, x, ident), x), 1e-15);

  const auto m = test_model(17);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto b = svd_compute_B(k, x, m);
    Matrix kron = Matrix::Identity(1, 1);
    for (std::size_t j = 0; j < 3; ++j) {
      if (j == k) continue;
      EXPECT_EQ(b.dim(j), m.rank(j, j));
      kron = kronecker(m.mats[j], kron);
    }
    EXPECT_EQ(b.dim(k), kShape[k]);
    EXPECT_LT(max_abs_diff(mode_n_unfold(b, k), mode_n_unfold(x, k) * kron), 1e-10);
  }
}

TEST(SvdUpdateMTest, OrthonormalAndOptimal) {
  std::mt19937_64 gen(18);
  const auto x = random_tensor(kShape, gen);
  const auto m = test_model(19);
  const auto b = svd_compute_B(0, x, m);
  const Matrix bk = mode_n_unfold(b, 0);
  const Matrix mk = svd_update_M(0, b, 3);
  EXPECT_LE((mk.transpose() * mk - Matrix::Identity(3, 3)).norm(), 1e-10);
  Eigen::JacobiSVD<Matrix> svd(bk);
  const auto s = svd.singularValues();
  double tail = 0.0;
  for (Eigen::Index i = 3; i < s.size(); ++i) tail += s(i) * s(i);
  EXPECT_NEAR((bk - mk * mk.transpose() * bk).norm(), std::sqrt(tail), 1e-8);
  const Matrix mf = svd_update_M(0, b, kShape[0]);
  EXPECT_LE((mf * mf.transpose() * bk - bk).norm(), 1e-10);
}

TEST(SvdUpdateGTest, MatrixCase) {
  std::mt19937_64 gen(20);
  const Shape shape{5, 4};
  RankMatrix r(2);
  r.set(0, 1, 2);
  r.set(0, 0, 3);
  r.set(1, 1, 3);
  const auto m = init_random_model(shape, r, 21);
  const auto x = random_tensor(shape, gen);
  const auto g = svd_update_G(0, x, m);
  // Node 1 is R12 x R22; node 0 is R11 x R12.
  const Matrix expected = m.mats[0].transpose() * x.to_matrix() * m.mats[1] *
                          pseudo_inverse(m.cores[1].to_matrix());
  EXPECT_LT((g.to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SvdUpdateGTest, FormsAgreeAndDecrease) {
  std::mt19937_64 gen(22);
  auto m = test_model(23);
  const auto x = random_tensor(kShape, gen);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto b = svd_compute_B(k, x, m);
    m.mats[k] = svd_update_M(k, b, m.rank(k, k));
    const double before = objective(x, m);
    const auto gp = svd_update_G_from_B(k, b, m, CoreSolveForm::kPseudoInverse);
    const auto gn = svd_update_G_from_B(k, b, m, CoreSolveForm::kNormalEquations);
    EXPECT_LT(max_abs_diff(gp, gn), 1e-10);
    m.cores[k] = gp;
    EXPECT_LE(objective(x, m), before * (1 + 1e-12));
    // Least-squares stationarity in the core.
    const Matrix rest = subchain_unfold_excluding(m.cores, k);
    const Matrix w = m.mats[k].transpose() * mode_n_unfold(b, k);
    const Matrix grad = (mode_n_unfold(gp, k) * rest - w) * rest.transpose();
    EXPECT_LE(grad.norm(), 1e-8);
  }
}

TEST(SvdUpdateXTest, Cases) {
  std::mt19937_64 gen(24);
  const auto m = test_model(25);
  const auto t = random_tensor(kShape, gen);
  const auto z = lmtn_compose(m);
  EXPECT_EQ(svd_update_X(t, ObservationMask(kShape, true), m), t);
  EXPECT_EQ(svd_update_X(t, ObservationMask(kShape, false), m), z);
  const auto mask = sample_mask(kShape, 0.4, 26);
  const auto once = svd_update_X(t, mask, m);
  EXPECT_EQ(svd_update_X(once, mask, m), once);
}

TEST(AdaptiveRankTest, GrowthRule) {
  EXPECT_TRUE(ar_should_increase(0.5, 0.4, 0.0, 0.1));
  EXPECT_FALSE(ar_should_increase(0.4, 0.4, 0.0, 0.1));
  EXPECT_FALSE(ar_should_increase(0.3, 0.3, 0.1, 0.9));
  // |0.44 - 0.4| == 0.1 * |0.4 - 0| up to rounding; use exact binary values.
  EXPECT_FALSE(ar_should_increase(0.5625, 0.5, 0.0, 0.125));
}

TEST(AdaptiveRankTest, DiagonalStep) {
  EXPECT_DOUBLE_EQ(ar_update_diag_rank(10.0, 20.0, 0.1), 11.0);
  EXPECT_DOUBLE_EQ(ar_update_diag_rank(7.0, 7.0, 0.3), 7.0);
  double r = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double next = ar_update_diag_rank(r, 9.0, 0.2);
    EXPECT_GE(next, r);
    EXPECT_LE(next, 9.0);
    r = next;
  }
  EXPECT_NEAR(r, 9.0, 1e-9);
}

TEST(AdaptiveRankTest, Expansion) {
  const auto m = test_model(27);
  const auto same = ar_expand_model(m, m.rank, 1);
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_EQ(same.cores[n], m.cores[n]);
    EXPECT_EQ(same.mats[n], m.mats[n]);
  }
  RankMatrix bigger = m.rank;
  bigger.set(0, 1, 3);
  bigger.set(2, 2, 4);
  const auto grown = ar_expand_model(m, bigger, 2);
  EXPECT_NO_THROW(grown.validate());
  for (std::size_t n = 0; n < 3; ++n) {
    const auto& old = m.cores[n];
    for (std::size_t i = 0; i < old.size(); ++i) {
      const auto idx = old.multi_index(i);
      EXPECT_EQ(grown.cores[n](idx), old[i]);
    }
    EXPECT_EQ(grown.mats[n].leftCols(m.mats[n].cols()), m.mats[n]);
  }
  const auto before = lmtn_compose(m);
  EXPECT_LE(frobenius_norm(lmtn_compose(grown) - before),
            5.0 * 0.1 * frobenius_norm(before));
  EXPECT_EQ(ar_expand_model(m, bigger, 2).cores[0], grown.cores[0]);
  RankMatrix smaller = m.rank;
  smaller.set(0, 1, 1);
  EXPECT_THROW(ar_expand_model(m, smaller, 3), ShapeError);
}

TEST(AdaptiveRankTest, InitialRanks) {
  RankMatrix cap = RankMatrix::uniform(3, 5, 6);
  cap.set(0, 2, 1);
  const auto r = ar_initial_rank(cap, {6, 6, 6});
  EXPECT_EQ(r(0, 1), 2u);
  EXPECT_EQ(r(0, 2), 1u);
  EXPECT_EQ(r(1, 1), 2u);
}

struct Planted {
  PlantedInstance p;
  ObservationMask mask;
};

Planted small_planted(double missing) {
  const Shape shape{8, 8, 8};
  Planted out{make_planted(shape, RankMatrix::uniform(3, 2, 3), 31, false),
              sample_mask(shape, missing, 32)};
  return out;
}

SolverConfig base_config() {
  SolverConfig c;
  c.rank = RankMatrix::uniform(3, 2, 3);
  c.seed = 33;
  return c;
}

TEST(DriverTest, InfiniteToleranceRunsOneSweep) {
  const auto inst = small_planted(0.3);
  auto c = base_config();
  c.tol = std::numeric_limits<double>::infinity();
  for (auto kind : {SolverKind::kPam, SolverKind::kSvd, SolverKind::kAr}) {
    const auto r = run_solver(kind, inst.p.tensor, inst.mask, c);
    EXPECT_EQ(r.report.iterations.size(), 1u) << to_string(kind);
    EXPECT_EQ(r.report.termination, Termination::kTolerance);
  }
}

TEST(DriverTest, FullyObservedRecovery) {
  const Shape shape{12, 12, 12};
  const RankMatrix rank = RankMatrix::uniform(3, 2, 2);
  const ObservationMask full(shape, true);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto p = make_planted(shape, rank, 100 + s, false);
    SolverConfig c;
    c.rank = rank;
    c.seed = 300 + s;
    c.tol = 1e-10;
    for (auto kind : {SolverKind::kPam, SolverKind::kSvd}) {
      const auto r = run_solver(kind, p.tensor, full, c);
      EXPECT_LE(rse(lmtn_compose(r.model), p.clean), 1e-3)
          << to_string(kind) << " seed " << s;
    }
  }
}

TEST(DriverTest, ObservedEntriesStayExactEverySweep) {
  const auto inst = small_planted(0.5);
  auto c = base_config();
  c.maxit = 20;
  for (auto kind : {SolverKind::kPam, SolverKind::kSvd, SolverKind::kAr}) {
    int checked = 0;
    c.on_iteration = [&](const IterationRecord&, const DenseTensor& x,
                         const DenseTensor&) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (inst.mask.observed(i)) {
          ASSERT_EQ(x[i], inst.p.tensor[i]);
        }
      }
      ++checked;
    };
    const auto r = run_solver(kind, inst.p.tensor, inst.mask, c);
    EXPECT_EQ(checked, static_cast<int>(r.report.iterations.size()));
    const auto x = r.x;
    EXPECT_EQ(project(x, inst.mask), project(inst.p.tensor, inst.mask));
  }
}

TEST(DriverTest, DeterministicReports) {
  const auto inst = small_planted(0.5);
  auto c = base_config();
  c.maxit = 15;
  for (auto kind : {SolverKind::kPam, SolverKind::kSvd, SolverKind::kAr}) {
    const auto a = run_solver(kind, inst.p.tensor, inst.mask, c);
    const auto b = run_solver(kind, inst.p.tensor, inst.mask, c);
    ASSERT_EQ(a.report.iterations.size(), b.report.iterations.size());
    for (std::size_t i = 0; i < a.report.iterations.size(); ++i) {
      EXPECT_EQ(a.report.iterations[i].objective, b.report.iterations[i].objective);
      EXPECT_EQ(a.report.iterations[i].rel_change, b.report.iterations[i].rel_change);
      EXPECT_EQ(a.report.iterations[i].rank, b.report.iterations[i].rank);
    }
    EXPECT_EQ(a.x, b.x);
  }
}

TEST(DriverTest, SvdTraceMonotoneAndOrthonormal) {
  const auto inst = small_planted(0.4);
  auto c = base_config();
  c.maxit = 60;
  c.tol = 1e-14;
  const auto r = run_lmtn_svd(inst.p.tensor, inst.mask, c);
  const auto& it = r.report.iterations;
  for (std::size_t s = 1; s < it.size(); ++s) {
    EXPECT_LE(it[s].objective, it[s - 1].objective * (1 + 1e-12)) << s;
  }
  for (const auto& m : r.model.mats) {
    EXPECT_LE((m.transpose() * m - Matrix::Identity(m.cols(), m.cols())).norm(), 1e-8);
  }
}

TEST(DriverTest, PamBlockStepsDecrease) {
  const auto inst = small_planted(0.4);
  auto c = base_config();
  c.maxit = 20;
  c.track_block_steps = true;
  const auto r = run_lmtn_pam(inst.p.tensor, inst.mask, c);
  ASSERT_EQ(r.report.block_steps.size(), r.report.iterations.size() * 7);
  for (const auto& s : r.report.block_steps) {
    EXPECT_GE(s.slack(), -1e-10) << s.iter << " " << s.block << s.mode;
  }
}

TEST(DriverTest, AdaptiveRanksGrowWithinCap) {
  const auto inst = small_planted(0.3);
  auto c = base_config();
  c.rank = RankMatrix::uniform(3, 3, 5);
  c.maxit = 80;
  const auto r = run_lmtn_ar(inst.p.tensor, inst.mask, c);
  RankMatrix prev = ar_initial_rank(c.rank, inst.p.tensor.shape());
  bool grew = false;
  for (const auto& rec : r.report.iterations) {
    EXPECT_TRUE(prev.entrywise_le(rec.rank));
    EXPECT_TRUE(rec.rank.entrywise_le(c.rank));
    grew = grew || !(rec.rank == prev);
    prev = rec.rank;
  }
  EXPECT_TRUE(grew);
  EXPECT_EQ(r.model.rank, prev);
}

TEST(DriverTest, AdaptiveWithTightCapMatchesSvd) {
  const auto inst = small_planted(0.3);
  auto c = base_config();
  c.rank = RankMatrix::uniform(3, 2, 2);
  c.maxit = 40;
  const auto ar = run_lmtn_ar(inst.p.tensor, inst.mask, c);
  const auto svd = run_lmtn_svd(inst.p.tensor, inst.mask, c);
  ASSERT_EQ(ar.report.iterations.size(), svd.report.iterations.size());
  for (std::size_t i = 0; i < ar.report.iterations.size(); ++i) {
    EXPECT_EQ(ar.report.iterations[i].objective, svd.report.iterations[i].objective);
  }
  EXPECT_EQ(ar.x, svd.x);
}

TEST(DriverTest, TranspositionEquivariantAtCommonFixedPoint) {
  const Shape shape{8, 7, 6};
  const RankMatrix rank = RankMatrix::uniform(3, 2, 2);
  const auto p = make_planted(shape, rank, 41, false);
  const ObservationMask full(shape, true);
  SolverConfig c;
  c.rank = rank;
  c.tol = 1e-13;
  c.maxit = 1000;
  const auto init = init_random_model(shape, rank, 43);
  const auto base = lmtn_compose(run_lmtn_svd(p.tensor, full, c, init).model);
  ASSERT_LE(rse(base, p.clean), 1e-9);
  std::vector<std::size_t> perm{0, 1, 2};
  while (std::next_permutation(perm.begin(), perm.end())) {
    auto pc = c;
    pc.rank = permute_rank(rank, perm);
    const auto r = run_lmtn_svd(generalized_transpose(p.tensor, perm),
                                full.transposed(perm), pc,
                                permute_model(init, perm));
    EXPECT_LT(max_abs_diff(lmtn_compose(r.model), generalized_transpose(base, perm)),
              1e-8);
  }
}

TEST(DriverTest, KernelFailureYieldsPartialReport) {
  auto inst = small_planted(0.3);
  std::size_t first = 0;
  while (!inst.mask.observed(first)) ++first;
  inst.p.tensor[first] = std::numeric_limits<double>::quiet_NaN();
  const auto r = run_lmtn_svd(inst.p.tensor, inst.mask, base_config());
  EXPECT_EQ(r.report.termination, Termination::kError);
  EXPECT_FALSE(r.report.error.empty());
}

TEST(ConfigTest, Validation) {
  const Shape shape{4, 4, 4};
  SolverConfig c;
  c.rank = RankMatrix::uniform(3, 2, 2);
  EXPECT_NO_THROW(c.validate(SolverKind::kSvd, shape));
  auto bad = c;
  bad.tol = 0.0;
  EXPECT_THROW(bad.validate(SolverKind::kSvd, shape), ShapeError);
  bad = c;
  bad.maxit = 0;
  EXPECT_THROW(bad.validate(SolverKind::kSvd, shape), ShapeError);
  bad = c;
  bad.tau = 1.0;
  EXPECT_THROW(bad.validate(SolverKind::kAr, shape), ShapeError);
  bad = c;
  bad.alpha = 0.0;
  EXPECT_THROW(bad.validate(SolverKind::kAr, shape), ShapeError);
  bad = c;
  bad.rho = 0.0;
  EXPECT_THROW(bad.validate(SolverKind::kPam, shape), ShapeError);
  bad = c;
  bad.rank = RankMatrix::uniform(3, 2, 5);
  EXPECT_THROW(bad.validate(SolverKind::kSvd, shape), ShapeError);
  EXPECT_EQ(solver_from_string("ar"), SolverKind::kAr);
  EXPECT_THROW(solver_from_string("als"), FormatError);
}

}  // namespace
}  // namespace lmtn
