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


#ifndef LMTN_TENSOR_HPP_
#define LMTN_TENSOR_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace lmtn {

using Shape = std::vector<std::size_t>;
using Matrix = Eigen::MatrixXd;

// Number of elements described by a shape. Throws ShapeError on overflow.
std::size_t shape_size(std::span<const std::size_t> shape);

// Dense N-order real tensor stored column-major: the first index varies
// fastest, which is also the layout of Eigen::MatrixXd for order 2.
//
// Every tensor has order >= 1 and every mode size >= 1. A default
// constructed tensor is the 1-element order-1 zero tensor.
class DenseTensor {
 public:
  DenseTensor();
  explicit DenseTensor(Shape shape);
  DenseTensor(Shape shape, std::vector<double> data);

  static DenseTensor constant(Shape shape, double value);
  static DenseTensor from_matrix(const Matrix& m);

  const Shape& shape() const { return shape_; }
  std::size_t order() const { return shape_.size(); }
  std::size_t dim(std::size_t mode) const { return shape_.at(mode); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double operator[](std::size_t linear) const { return data_[linear]; }
  double& operator[](std::size_t linear) { return data_[linear]; }

  // Multi-index access, 0-based.
  double operator()(std::span<const std::size_t> index) const;
  double& operator()(std::span<const std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;
  double& at(std::initializer_list<std::size_t> index);

  std::size_t linear_index(std::span<const std::size_t> index) const;
  std::vector<std::size_t> multi_index(std::size_t linear) const;

  // Views an order-1 or order-2 tensor as a matrix (order 1 is a column).
  Matrix to_matrix() const;

  // Same data, new shape with the same element count.
  DenseTensor reshaped(Shape shape) const;

  DenseTensor& operator+=(const DenseTensor& other);
  DenseTensor& operator-=(const DenseTensor& other);
  DenseTensor& operator*=(double scale);

  friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

DenseTensor operator+(DenseTensor a, const DenseTensor& b);
DenseTensor operator-(DenseTensor a, const DenseTensor& b);
DenseTensor operator*(double scale, DenseTensor a);

// Permutation of the modes plus a row/column split point, used by the
// generalized unfolding. perm lists the source modes in their new order and
// the first `split` of them become matrix rows.
struct ModeSequence {
  std::vector<std::size_t> perm;
  std::size_t split = 1;

  void validate(std::size_t order) const;
};

bool is_permutation(std::span<const std::size_t> perm, std::size_t order);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> perm);

// Mode-n matricization. Columns enumerate the remaining modes in ascending
// order with the first remaining mode varying fastest. An order-1 tensor
// unfolds to a column.
Matrix mode_n_unfold(const DenseTensor& x, std::size_t n);
DenseTensor mode_n_fold(const Matrix& m, std::size_t n, const Shape& shape);

// result(j_0..j_{N-1}) = x(i) with i[perm[k]] = j_k; result mode k has size
// shape[perm[k]]. Equivalent to MATLAB's permute.
DenseTensor generalized_transpose(const DenseTensor& x,
                                  std::span<const std::size_t> perm);

// Transpose by seq.perm, then reshape column-major into
// (prod of the first split permuted sizes) x (prod of the rest).
Matrix generalized_unfold(const DenseTensor& x, const ModeSequence& seq);
DenseTensor generalized_fold(const Matrix& m, const ModeSequence& seq,
                             const Shape& shape);

// x x_n u: replaces mode n of size I_n by rows(u); requires cols(u) == I_n.
DenseTensor mode_n_product(const DenseTensor& x, const Matrix& u,
                           std::size_t n);

Matrix kronecker(const Matrix& a, const Matrix& b);

// Contracts a_modes of a against b_modes of b pairwise. The result holds the
// free modes of a (ascending) followed by the free modes of b (ascending).
// When every mode is contracted the result is the 1-element order-1 tensor.
DenseTensor tensor_contract(const DenseTensor& a,
                            std::span<const std::size_t> a_modes,
                            const DenseTensor& b,
                            std::span<const std::size_t> b_modes);

double frobenius_norm(const DenseTensor& x);
double squared_norm(const DenseTensor& x);

}  // namespace lmtn

#endif  // LMTN_TENSOR_HPP_
