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


#ifndef LMTN_LINALG_HPP_
#define LMTN_LINALG_HPP_

#include <cstddef>

#include "lmtn/tensor.hpp"

namespace lmtn {

// Thin SVD factors. Columns of u and rows of vt are orthonormal, s is
// non-negative and descending. Each column of u is signed so that its
// largest-magnitude entry is positive (ties go to the lowest row), which
// makes results reproducible across runs.
struct SvdResult {
  Matrix u;
  Eigen::VectorXd s;
  Matrix vt;

  Matrix reconstruct() const;
};

// Top-r singular triplets of m; 1 <= r <= min(rows, cols).
SvdResult truncated_svd(const Matrix& m, std::size_t r);

// Leading r left singular vectors of m with the same sign convention as
// truncated_svd. Wide matrices go through the eigenvectors of m m^T.
Matrix leading_left_singular_vectors(const Matrix& m, std::size_t r);

inline constexpr double kDefaultPinvCutoff = 1e-12;

// Moore-Penrose inverse; singular values below tol * s_max are dropped.
Matrix pseudo_inverse(const Matrix& m, double tol = kDefaultPinvCutoff);

struct SpdSolution {
  Matrix x;
  // Ridge actually added to the diagonal (0 when the plain factorization
  // succeeded) and how many escalation steps were needed.
  double ridge = 0.0;
  int escalations = 0;
};

// Solves (a + ridge*I) x = b for symmetric positive semi-definite a. The
// plain Cholesky factorization is tried first; on failure the ridge walks
// through max(ridge, {1e-12, 1e-10, 1e-8} * trace(a)/p).
SpdSolution solve_spd(const Matrix& a, const Matrix& b, double ridge = 0.0);

enum class SylvesterMethod { kAuto, kKronecker, kSchur };

// Largest p*q for which kAuto uses the dense Kronecker system.
inline constexpr std::size_t kKroneckerSylvesterLimit = 4096;

// Solves a*x + x*b = c with a p x p, b q x q and c p x q. The Kronecker route
// solves (I_q (x) a + b^T (x) I_p) vec(x) = vec(c); the Schur route is a
// complex Bartels-Stewart back substitution. The relative residual
// ||a x + x b - c|| / max(1, ||c||) is checked against 1e-8.
Matrix sylvester_solve(const Matrix& a, const Matrix& b, const Matrix& c,
                       SylvesterMethod method = SylvesterMethod::kAuto);

double sylvester_residual(const Matrix& a, const Matrix& b, const Matrix& c,
                          const Matrix& x);

}  // namespace lmtn

#endif  // LMTN_LINALG_HPP_
