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


#include "lmtn/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "lmtn/error.hpp"

namespace lmtn {
namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + ": non-finite input entries");
  }
}

// Flip column j of u (and row j of vt) so that its largest-magnitude entry is
// positive.
void normalize_signs(Matrix& u, Matrix& vt) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double mag = std::abs(u(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (u(arg, j) < 0.0) {
      u.col(j) *= -1.0;
      vt.row(j) *= -1.0;
    }
  }
}

double relative_residual(const Matrix& residual, const Matrix& rhs) {
  return residual.norm() / std::max(1.0, rhs.norm());
}

}  // namespace

Matrix SvdResult::reconstruct() const { return u * s.asDiagonal() * vt; }

SvdResult truncated_svd(const Matrix& m, std::size_t r) {
  const auto k = static_cast<std::size_t>(std::min(m.rows(), m.cols()));
  if (r < 1 || r > k) {
    throw ShapeError("truncated_svd: rank " + std::to_string(r) +
                     " outside [1, " + std::to_string(k) + "]");
  }
  require_finite(m, "truncated_svd");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto rr = static_cast<Eigen::Index>(r);
  SvdResult out;
  out.u = svd.matrixU().leftCols(rr);
  out.s = svd.singularValues().head(rr);
  out.vt = svd.matrixV().leftCols(rr).transpose();
  normalize_signs(out.u, out.vt);
  return out;
}

Matrix leading_left_singular_vectors(const Matrix& m, std::size_t r) {
  if (m.rows() > m.cols()) return truncated_svd(m, r).u;
  const auto k = static_cast<std::size_t>(m.rows());
  if (r < 1 || r > k) {
    throw ShapeError("leading_left_singular_vectors: rank " +
                     std::to_string(r) + " outside [1, " + std::to_string(k) +
                     "]");
  }
  require_finite(m, "leading_left_singular_vectors");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m * m.transpose());
  if (eig.info() != Eigen::Success) {
    throw NumericalError("leading_left_singular_vectors: eigensolver failed");
  }
  // Eigenvalues come back ascending.
  const auto rr = static_cast<Eigen::Index>(r);
  Matrix u = eig.eigenvectors().rightCols(rr).rowwise().reverse();
  Matrix unused(rr, 0);
  normalize_signs(u, unused);
  return u;
}

Matrix pseudo_inverse(const Matrix& m, double tol) {
  require_finite(m, "pseudo_inverse");
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = tol * (s.size() > 0 ? s(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SpdSolution solve_spd(const Matrix& a, const Matrix& b, double ridge) {
  if (a.rows() != a.cols()) throw ShapeError("solve_spd: matrix not square");
  if (b.rows() != a.rows()) {
    throw ShapeError("solve_spd: right-hand side has " +
                     std::to_string(b.rows()) + " rows, expected " +
                     std::to_string(a.rows()));
  }
  if (ridge < 0.0) throw ShapeError("solve_spd: negative ridge");
  require_finite(a, "solve_spd");
  require_finite(b, "solve_spd");

  const auto p = a.rows();
  const Matrix identity = Matrix::Identity(p, p);
  auto attempt = [&](double rid, SpdSolution& out) {
    const Matrix shifted = a + rid * identity;
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() != Eigen::Success) return false;
    Matrix x = llt.solve(b);
    if (!x.allFinite()) return false;
    if (relative_residual(shifted * x - b, b) > 1e-8) return false;
    out.x = std::move(x);
    out.ridge = rid;
    return true;
  };

  SpdSolution out;
  if (attempt(ridge, out)) return out;

  const double trace = a.trace();
  const double scale = trace > 0.0 ? trace / static_cast<double>(p) : 1.0;
  constexpr std::array<double, 3> kSteps = {1e-12, 1e-10, 1e-8};
  for (std::size_t i = 0; i < kSteps.size(); ++i) {
    out.escalations = static_cast<int>(i) + 1;
    if (attempt(std::max(ridge, kSteps[i] * scale), out)) return out;
  }
  throw NumericalError("solve_spd: system singular after ridge escalation");
}

double sylvester_residual(const Matrix& a, const Matrix& b, const Matrix& c,
                          const Matrix& x) {
  return relative_residual(a * x + x * b - c, c);
}

namespace {

Matrix sylvester_kronecker(const Matrix& a, const Matrix& b, const Matrix& c) {
  const auto p = a.rows();
  const auto q = b.rows();
  const Matrix system = kronecker(Matrix::Identity(q, q), a) +
                        kronecker(b.transpose(), Matrix::Identity(p, p));
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > std::numeric_limits<double>::epsilon())) {
    throw NumericalError("sylvester_solve: singular Kronecker system");
  }
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
  const Eigen::VectorXd sol = lu.solve(rhs);
  return Eigen::Map<const Matrix>(sol.data(), p, q);
}

Matrix sylvester_schur(const Matrix& a, const Matrix& b, const Matrix& c) {
  using CMatrix = Eigen::MatrixXcd;
  const auto p = a.rows();
  const auto q = b.rows();
  Eigen::ComplexSchur<Matrix> schur_a(a);
  Eigen::ComplexSchur<Matrix> schur_b(b);
  const CMatrix& ua = schur_a.matrixU();
  const CMatrix& ta = schur_a.matrixT();
  const CMatrix& ub = schur_b.matrixU();
  const CMatrix& tb = schur_b.matrixT();

  const CMatrix f = ua.adjoint() * c.cast<std::complex<double>>() * ub;
  CMatrix y(p, q);
  const double scale = std::max({1.0, ta.cwiseAbs().maxCoeff(),
                                 tb.cwiseAbs().maxCoeff()});
  for (Eigen::Index j = 0; j < q; ++j) {
    Eigen::VectorXcd rhs = f.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs -= tb(i, j) * y.col(i);
    CMatrix shifted = ta;
    shifted.diagonal().array() += tb(j, j);
    for (Eigen::Index i = 0; i < p; ++i) {
      if (std::abs(shifted(i, i)) <=
          scale * std::numeric_limits<double>::epsilon()) {
        throw NumericalError(
            "sylvester_solve: spectra of a and -b intersect");
      }
    }
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return (ua * y * ub.adjoint()).real();
}

}  // namespace

Matrix sylvester_solve(const Matrix& a, const Matrix& b, const Matrix& c,
                       SylvesterMethod method) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw ShapeError("sylvester_solve: a and b must be square");
  }
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw ShapeError("sylvester_solve: c must be " + std::to_string(a.rows()) +
                     "x" + std::to_string(b.rows()));
  }
  require_finite(a, "sylvester_solve");
  require_finite(b, "sylvester_solve");
  require_finite(c, "sylvester_solve");

  if (method == SylvesterMethod::kAuto) {
    const auto pq = static_cast<std::size_t>(a.rows() * b.rows());
    method = pq <= kKroneckerSylvesterLimit ? SylvesterMethod::kKronecker
                                            : SylvesterMethod::kSchur;
  }
  Matrix x = method == SylvesterMethod::kKronecker ? sylvester_kronecker(a, b, c)
                                                   : sylvester_schur(a, b, c);
  const double res = sylvester_residual(a, b, c, x);
  if (!(res <= 1e-8)) {
    throw NumericalError("sylvester_solve: residual " + std::to_string(res) +
                         " exceeds 1e-8");
  }
  return x;
}

}  // namespace lmtn
