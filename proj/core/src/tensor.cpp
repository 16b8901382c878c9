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


#include "lmtn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "lmtn/error.hpp"

namespace lmtn {
namespace {

std::string shape_string(std::span<const std::size_t> shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

void check_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor order must be >= 1");
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ShapeError("mode sizes must be >= 1, got " + shape_string(shape));
    }
  }
}

void check_mode(std::size_t n, std::size_t order) {
  if (n >= order) {
    throw ShapeError("mode index " + std::to_string(n) +
                     " out of range for order " + std::to_string(order));
  }
}

std::vector<std::size_t> strides_of(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size());
  std::size_t s = 1;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    strides[i] = s;
    s *= shape[i];
  }
  return strides;
}

}  // namespace

std::size_t shape_size(std::span<const std::size_t> shape) {
  std::size_t total = 1;
  for (std::size_t d : shape) {
    if (d != 0 && total > std::numeric_limits<std::size_t>::max() / d) {
      throw ShapeError("shape " + shape_string(shape) + " overflows size_t");
    }
    total *= d;
  }
  return total;
}

DenseTensor::DenseTensor() : shape_{1}, data_(1, 0.0) {}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(shape_size(shape_), 0.0);
}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != shape_size(shape_)) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
  }
}

DenseTensor DenseTensor::constant(Shape shape, double value) {
  DenseTensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

DenseTensor DenseTensor::from_matrix(const Matrix& m) {
  Shape shape{static_cast<std::size_t>(m.rows()),
              static_cast<std::size_t>(m.cols())};
  return DenseTensor(std::move(shape),
                     std::vector<double>(m.data(), m.data() + m.size()));
}

std::size_t DenseTensor::linear_index(
    std::span<const std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw ShapeError("index arity " + std::to_string(index.size()) +
                     " does not match order " + std::to_string(order()));
  }
  std::size_t linear = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (index[i] >= shape_[i]) {
      throw ShapeError("index out of range on mode " + std::to_string(i));
    }
    linear += index[i] * stride;
    stride *= shape_[i];
  }
  return linear;
}

std::vector<std::size_t> DenseTensor::multi_index(std::size_t linear) const {
  std::vector<std::size_t> index(shape_.size());
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    index[i] = linear % shape_[i];
    linear /= shape_[i];
  }
  return index;
}

double DenseTensor::operator()(std::span<const std::size_t> index) const {
  return data_[linear_index(index)];
}

double& DenseTensor::operator()(std::span<const std::size_t> index) {
  return data_[linear_index(index)];
}

double DenseTensor::at(std::initializer_list<std::size_t> index) const {
  return (*this)(std::span<const std::size_t>(index.begin(), index.size()));
}

double& DenseTensor::at(std::initializer_list<std::size_t> index) {
  return (*this)(std::span<const std::size_t>(index.begin(), index.size()));
}

Matrix DenseTensor::to_matrix() const {
  if (order() > 2) {
    throw ShapeError("to_matrix requires order <= 2, got " +
                     std::to_string(order()));
  }
  const auto rows = static_cast<Eigen::Index>(shape_[0]);
  const auto cols = static_cast<Eigen::Index>(order() == 2 ? shape_[1] : 1);
  return Eigen::Map<const Matrix>(data_.data(), rows, cols);
}

DenseTensor DenseTensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " +
                     shape_string(shape));
  }
  return DenseTensor(std::move(shape), data_);
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& other) {
  if (other.shape_ != shape_) throw ShapeError("operand shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& other) {
  if (other.shape_ != shape_) throw ShapeError("operand shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseTensor& DenseTensor::operator*=(double scale) {
  for (double& v : data_) v *= scale;
  return *this;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
DenseTensor operator*(double scale, DenseTensor a) { return a *= scale; }

bool is_permutation(std::span<const std::size_t> perm, std::size_t order) {
  if (perm.size() != order) return false;
  std::vector<bool> seen(order, false);
  for (std::size_t p : perm) {
    if (p >= order || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

std::vector<std::size_t> inverse_permutation(
    std::span<const std::size_t> perm) {
  if (!is_permutation(perm, perm.size())) {
    throw ShapeError("not a permutation");
  }
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  return inv;
}

void ModeSequence::validate(std::size_t order) const {
  if (!is_permutation(perm, order)) {
    throw ShapeError("mode sequence is not a permutation of the " +
                     std::to_string(order) + " modes");
  }
  if (order >= 2 && (split < 1 || split >= order)) {
    throw ShapeError("mode sequence split must lie in [1, order)");
  }
  if (order == 1 && split != 1) {
    throw ShapeError("order-1 mode sequence must split at 1");
  }
}

DenseTensor generalized_transpose(const DenseTensor& x,
                                  std::span<const std::size_t> perm) {
  const std::size_t order = x.order();
  if (!is_permutation(perm, order)) {
    throw ShapeError("generalized_transpose: perm is not a bijection on " +
                     std::to_string(order) + " modes");
  }
  const Shape& src_shape = x.shape();
  const auto src_strides = strides_of(src_shape);

  Shape out_shape(order);
  std::vector<std::size_t> step(order);
  for (std::size_t k = 0; k < order; ++k) {
    out_shape[k] = src_shape[perm[k]];
    step[k] = src_strides[perm[k]];
  }

  std::vector<double> out(x.size());
  std::vector<std::size_t> counter(order, 0);
  std::size_t offset = 0;
  const auto src = x.data();
  for (std::size_t linear = 0; linear < out.size(); ++linear) {
    out[linear] = src[offset];
    for (std::size_t k = 0; k < order; ++k) {
      if (++counter[k] < out_shape[k]) {
        offset += step[k];
        break;
      }
      offset -= step[k] * (out_shape[k] - 1);
      counter[k] = 0;
    }
  }
  return DenseTensor(std::move(out_shape), std::move(out));
}

Matrix generalized_unfold(const DenseTensor& x, const ModeSequence& seq) {
  seq.validate(x.order());
  const DenseTensor t = generalized_transpose(x, seq.perm);
  std::size_t rows = 1;
  for (std::size_t k = 0; k < seq.split && k < t.order(); ++k) {
    rows *= t.dim(k);
  }
  const std::size_t cols = t.size() / rows;
  return Eigen::Map<const Matrix>(t.data().data(),
                                  static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

DenseTensor generalized_fold(const Matrix& m, const ModeSequence& seq,
                             const Shape& shape) {
  seq.validate(shape.size());
  Shape permuted(shape.size());
  for (std::size_t k = 0; k < shape.size(); ++k) {
    permuted[k] = shape[seq.perm[k]];
  }
  std::size_t rows = 1;
  for (std::size_t k = 0; k < seq.split && k < permuted.size(); ++k) {
    rows *= permuted[k];
  }
  const std::size_t total = shape_size(shape);
  if (static_cast<std::size_t>(m.rows()) != rows ||
      static_cast<std::size_t>(m.size()) != total) {
    throw ShapeError("generalized_fold: matrix " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()) +
                     " does not match target shape " + shape_string(shape));
  }
  DenseTensor t(std::move(permuted),
                std::vector<double>(m.data(), m.data() + m.size()));
  return generalized_transpose(t, inverse_permutation(seq.perm));
}

namespace {

ModeSequence mode_n_sequence(std::size_t n, std::size_t order) {
  ModeSequence seq;
  seq.perm.reserve(order);
  seq.perm.push_back(n);
  for (std::size_t i = 0; i < order; ++i) {
    if (i != n) seq.perm.push_back(i);
  }
  seq.split = 1;
  return seq;
}

}  // namespace

Matrix mode_n_unfold(const DenseTensor& x, std::size_t n) {
  check_mode(n, x.order());
  return generalized_unfold(x, mode_n_sequence(n, x.order()));
}

DenseTensor mode_n_fold(const Matrix& m, std::size_t n, const Shape& shape) {
  check_mode(n, shape.size());
  const std::size_t total = shape_size(shape);
  if (static_cast<std::size_t>(m.rows()) != shape[n] ||
      static_cast<std::size_t>(m.cols()) != total / shape[n]) {
    throw ShapeError("mode_n_fold: matrix " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " does not unfold shape " +
                     shape_string(shape) + " at mode " + std::to_string(n));
  }
  return generalized_fold(m, mode_n_sequence(n, shape.size()), shape);
}

DenseTensor mode_n_product(const DenseTensor& x, const Matrix& u,
                           std::size_t n) {
  check_mode(n, x.order());
  if (static_cast<std::size_t>(u.cols()) != x.dim(n)) {
    throw ShapeError("mode_n_product: matrix has " + std::to_string(u.cols()) +
                     " columns, mode " + std::to_string(n) + " has size " +
                     std::to_string(x.dim(n)));
  }
  Shape out_shape = x.shape();
  out_shape[n] = static_cast<std::size_t>(u.rows());

  // Treat x as (left block) x I_n x (right block); no permutation needed.
  std::size_t left = 1;
  for (std::size_t i = 0; i < n; ++i) left *= x.dim(i);
  const std::size_t in = x.dim(n);
  const std::size_t right = x.size() / (left * in);
  const auto out_rows = static_cast<Eigen::Index>(u.rows());

  std::vector<double> out(left * static_cast<std::size_t>(out_rows) * right);
  for (std::size_t r = 0; r < right; ++r) {
    Eigen::Map<const Matrix> src(x.data().data() + r * left * in,
                                 static_cast<Eigen::Index>(left),
                                 static_cast<Eigen::Index>(in));
    Eigen::Map<Matrix> dst(out.data() + r * left * out_rows,
                           static_cast<Eigen::Index>(left), out_rows);
    dst.noalias() = src * u.transpose();
  }
  return DenseTensor(std::move(out_shape), std::move(out));
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DenseTensor tensor_contract(const DenseTensor& a,
                            std::span<const std::size_t> a_modes,
                            const DenseTensor& b,
                            std::span<const std::size_t> b_modes) {
  if (a_modes.empty() || a_modes.size() != b_modes.size()) {
    throw ShapeError("tensor_contract: mode lists must be non-empty and of "
                     "equal length");
  }
  auto free_modes = [](std::span<const std::size_t> modes, std::size_t order,
                       const char* name) {
    std::vector<bool> used(order, false);
    for (std::size_t m : modes) {
      if (m >= order) {
        throw ShapeError(std::string("tensor_contract: ") + name +
                         " mode out of range");
      }
      if (used[m]) {
        throw ShapeError(std::string("tensor_contract: duplicate ") + name +
                         " mode " + std::to_string(m));
      }
      used[m] = true;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < order; ++i) {
      if (!used[i]) rest.push_back(i);
    }
    return rest;
  };
  const auto a_free = free_modes(a_modes, a.order(), "a");
  const auto b_free = free_modes(b_modes, b.order(), "b");
  for (std::size_t i = 0; i < a_modes.size(); ++i) {
    if (a.dim(a_modes[i]) != b.dim(b_modes[i])) {
      throw ShapeError("tensor_contract: paired modes " +
                       std::to_string(a_modes[i]) + "/" +
                       std::to_string(b_modes[i]) + " differ in size");
    }
  }

  // C = A_[free; contracted] * B_[contracted; free]
  Matrix am;
  if (a_free.empty()) {
    ModeSequence seq{std::vector<std::size_t>(a_modes.begin(), a_modes.end()),
                     1};
    const DenseTensor t = generalized_transpose(a, seq.perm);
    am = Eigen::Map<const Matrix>(t.data().data(), 1,
                                  static_cast<Eigen::Index>(t.size()));
  } else {
    ModeSequence seq{a_free, a_free.size()};
    seq.perm.insert(seq.perm.end(), a_modes.begin(), a_modes.end());
    am = generalized_unfold(a, seq);
  }
  Matrix bm;
  {
    std::vector<std::size_t> perm(b_modes.begin(), b_modes.end());
    perm.insert(perm.end(), b_free.begin(), b_free.end());
    const DenseTensor t = generalized_transpose(b, perm);
    std::size_t rows = 1;
    for (std::size_t m : b_modes) rows *= b.dim(m);
    bm = Eigen::Map<const Matrix>(t.data().data(),
                                  static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(t.size() / rows));
  }
  const Matrix cm = am * bm;

  Shape out_shape;
  for (std::size_t m : a_free) out_shape.push_back(a.dim(m));
  for (std::size_t m : b_free) out_shape.push_back(b.dim(m));
  if (out_shape.empty()) out_shape.push_back(1);
  return DenseTensor(std::move(out_shape),
                     std::vector<double>(cm.data(), cm.data() + cm.size()));
}

double squared_norm(const DenseTensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return s;
}

double frobenius_norm(const DenseTensor& x) { return std::sqrt(squared_norm(x)); }

}  // namespace lmtn
