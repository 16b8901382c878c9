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


#ifndef LMTN_MODEL_HPP_
#define LMTN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lmtn/tensor.hpp"

namespace lmtn {

// N x N array of positive ranks. Off-diagonal (i, j) is the edge rank shared
// by cores i and j; diagonal (n, n) is the inner rank between core n and its
// latent matrix. Stored in full and kept symmetric.
class RankMatrix {
 public:
  RankMatrix() = default;
  explicit RankMatrix(std::size_t order, std::size_t fill = 1);
  explicit RankMatrix(const std::vector<std::vector<std::size_t>>& rows);

  // Off-diagonals `edge`, diagonal `diag`.
  static RankMatrix uniform(std::size_t order, std::size_t edge,
                            std::size_t diag);

  std::size_t order() const { return order_; }
  std::size_t operator()(std::size_t i, std::size_t j) const {
    return r_[i * order_ + j];
  }
  // Sets (i, j) and (j, i).
  void set(std::size_t i, std::size_t j, std::size_t value);

  std::vector<std::vector<std::size_t>> rows() const;
  std::string to_string() const;

  // Entrywise a(i,j) <= b(i,j).
  bool entrywise_le(const RankMatrix& other) const;

  friend bool operator==(const RankMatrix&, const RankMatrix&) = default;

 private:
  std::size_t order_ = 0;
  std::vector<std::size_t> r_;
};

// Throws ShapeError when r is asymmetric, has a zero entry, does not match
// the order of shape, or has a diagonal entry above the mode size.
const RankMatrix& validate_rank_matrix(const RankMatrix& r, const Shape& shape);

// Shape of core n: mode m has size r(min(m,n), max(m,n)); mode n is r(n,n).
Shape core_shape(const RankMatrix& r, std::size_t n);

// N FCTN cores plus one I_n x R_nn latent matrix per mode. The represented
// tensor is FCTN(cores) x_1 M_1 x_2 ... x_N M_N.
struct LmtnModel {
  Shape shape;
  RankMatrix rank;
  std::vector<DenseTensor> cores;
  std::vector<Matrix> mats;

  std::size_t order() const { return shape.size(); }
  // Checks every core and matrix against rank and shape.
  void validate() const;
};

// Gaussian cores scaled by 1/sqrt(mean core mode size) and matrices taken as
// the orthonormal Q factor of a Gaussian matrix. Deterministic in seed.
LmtnModel init_random_model(const Shape& shape, const RankMatrix& rank,
                            std::uint64_t seed);

// Composes a fully connected network. Node n is an order-N tensor whose mode
// n is free and whose mode m != n is the edge shared with node m. Nodes are
// contracted left to right.
DenseTensor fctn_compose(std::span<const DenseTensor> nodes);

DenseTensor lmtn_compose(const LmtnModel& model);

// Y_n = G_n x_n M_n for every n.
std::vector<DenseTensor> latent_nodes(const LmtnModel& model);

// Network with node k removed. The result has order 2(N-1): for each j != k
// in ascending order, node j contributes its free mode and its edge toward k,
// in node j's own mode order.
DenseTensor compose_excluding(std::span<const DenseTensor> nodes,
                              std::size_t k);

// Unfolding of compose_excluding(nodes, k) with the edges toward k as rows
// and the free modes as columns, so that for a composed tensor X
//   X_(k) = (node_k)_(k) * subchain_unfold_excluding(nodes, k).
Matrix subchain_unfold_excluding(std::span<const DenseTensor> nodes,
                                 std::size_t k);

// The row/column mode sequence used by subchain_unfold_excluding.
ModeSequence excluding_sequence(std::size_t order, std::size_t k);

std::size_t count_parameters(const LmtnModel& model);

// N*R2*R1^(N-1) + N*I*R2 for uniform size I, edge rank R1, diagonal R2.
std::size_t closed_form_count(std::size_t order, std::size_t size,
                              std::size_t edge_rank, std::size_t diag_rank);

// N*I*R1^(N-1), the plain FCTN count.
std::size_t fctn_closed_form_count(std::size_t order, std::size_t size,
                                   std::size_t edge_rank);

// Relabels a model for the transposed tensor generalized_transpose(X, perm):
// node k of the result is node perm[k] of the input.
LmtnModel permute_model(const LmtnModel& model,
                        std::span<const std::size_t> perm);
RankMatrix permute_rank(const RankMatrix& r, std::span<const std::size_t> perm);

}  // namespace lmtn

#endif  // LMTN_MODEL_HPP_
