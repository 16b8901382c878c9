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


#include "lmtn/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "lmtn/error.hpp"

namespace lmtn {

RankMatrix::RankMatrix(std::size_t order, std::size_t fill)
    : order_(order), r_(order * order, fill) {}

RankMatrix::RankMatrix(const std::vector<std::vector<std::size_t>>& rows)
    : order_(rows.size()), r_(rows.size() * rows.size(), 0) {
  for (std::size_t i = 0; i < order_; ++i) {
    if (rows[i].size() != order_) {
      throw ShapeError("rank matrix must be square");
    }
    for (std::size_t j = 0; j < order_; ++j) r_[i * order_ + j] = rows[i][j];
  }
}

RankMatrix RankMatrix::uniform(std::size_t order, std::size_t edge,
                               std::size_t diag) {
  RankMatrix r(order, edge);
  for (std::size_t n = 0; n < order; ++n) r.set(n, n, diag);
  return r;
}

void RankMatrix::set(std::size_t i, std::size_t j, std::size_t value) {
  r_[i * order_ + j] = value;
  r_[j * order_ + i] = value;
}

std::vector<std::vector<std::size_t>> RankMatrix::rows() const {
  std::vector<std::vector<std::size_t>> out(order_);
  for (std::size_t i = 0; i < order_; ++i) {
    out[i].assign(r_.begin() + static_cast<std::ptrdiff_t>(i * order_),
                  r_.begin() + static_cast<std::ptrdiff_t>((i + 1) * order_));
  }
  return out;
}

std::string RankMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < order_; ++i) {
    if (i) os << ";";
    for (std::size_t j = 0; j < order_; ++j) {
      if (j) os << " ";
      os << (*this)(i, j);
    }
  }
  os << "]";
  return os.str();
}

bool RankMatrix::entrywise_le(const RankMatrix& other) const {
  if (other.order_ != order_) return false;
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (r_[i] > other.r_[i]) return false;
  }
  return true;
}

const RankMatrix& validate_rank_matrix(const RankMatrix& r,
                                       const Shape& shape) {
  const std::size_t n = r.order();
  if (n == 0 || n != shape.size()) {
    throw ShapeError("rank matrix order " + std::to_string(n) +
                     " does not match tensor order " +
                     std::to_string(shape.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (r(i, j) == 0) {
        throw ShapeError("rank matrix entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") must be positive");
      }
      if (r(i, j) != r(j, i)) {
        throw ShapeError("rank matrix is not symmetric at (" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
    if (r(i, i) > shape[i]) {
      throw ShapeError("diagonal rank " + std::to_string(r(i, i)) +
                       " exceeds mode size " + std::to_string(shape[i]) +
                       " on mode " + std::to_string(i));
    }
  }
  return r;
}

Shape core_shape(const RankMatrix& r, std::size_t n) {
  Shape s(r.order());
  for (std::size_t m = 0; m < r.order(); ++m) s[m] = r(m, n);
  return s;
}

void LmtnModel::validate() const {
  validate_rank_matrix(rank, shape);
  const std::size_t n = shape.size();
  if (cores.size() != n || mats.size() != n) {
    throw ShapeError("model must hold one core and one matrix per mode");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (cores[k].shape() != core_shape(rank, k)) {
      throw ShapeError("core " + std::to_string(k) +
                       " does not match the rank matrix");
    }
    if (static_cast<std::size_t>(mats[k].rows()) != shape[k] ||
        static_cast<std::size_t>(mats[k].cols()) != rank(k, k)) {
      throw ShapeError("latent matrix " + std::to_string(k) +
                       " must be I_n x R_nn");
    }
  }
}

LmtnModel init_random_model(const Shape& shape, const RankMatrix& rank,
                            std::uint64_t seed) {
  validate_rank_matrix(rank, shape);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  LmtnModel model;
  model.shape = shape;
  model.rank = rank;
  const std::size_t n = shape.size();
  for (std::size_t k = 0; k < n; ++k) {
    Shape cs = core_shape(rank, k);
    double mean_size = 0.0;
    for (std::size_t d : cs) mean_size += static_cast<double>(d);
    mean_size /= static_cast<double>(cs.size());
    const double scale = 1.0 / std::sqrt(mean_size);
    DenseTensor core(std::move(cs));
    for (double& v : core.data()) v = scale * normal(gen);
    model.cores.push_back(std::move(core));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const auto rows = static_cast<Eigen::Index>(shape[k]);
    const auto cols = static_cast<Eigen::Index>(rank(k, k));
    Matrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
      for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(gen);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    model.mats.push_back(qr.householderQ() * Matrix::Identity(rows, cols));
  }
  return model;
}

namespace {

// A mode label: {n, n} is the free mode of node n, {i, j} with i < j the edge
// between nodes i and j.
struct Label {
  std::size_t a;
  std::size_t b;
  friend bool operator==(const Label&, const Label&) = default;
};

Label node_label(std::size_t node, std::size_t mode) {
  return {std::min(node, mode), std::max(node, mode)};
}

struct LabeledTensor {
  DenseTensor t;
  std::vector<Label> labels;
};

void check_nodes(std::span<const DenseTensor> nodes) {
  const std::size_t n = nodes.size();
  if (n == 0) throw ShapeError("network needs at least one node");
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].order() != n) {
      throw ShapeError("node " + std::to_string(i) + " has order " +
                       std::to_string(nodes[i].order()) + ", expected " +
                       std::to_string(n));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (nodes[i].dim(j) != nodes[j].dim(i)) {
        throw ShapeError("edge rank mismatch between nodes " +
                         std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

LabeledTensor labeled_node(const DenseTensor& node, std::size_t index) {
  LabeledTensor out{node, {}};
  for (std::size_t m = 0; m < node.order(); ++m) {
    out.labels.push_back(node_label(index, m));
  }
  return out;
}

LabeledTensor contract_shared(const LabeledTensor& lhs,
                              const LabeledTensor& rhs) {
  std::vector<std::size_t> lm;
  std::vector<std::size_t> rm;
  for (std::size_t i = 0; i < lhs.labels.size(); ++i) {
    for (std::size_t j = 0; j < rhs.labels.size(); ++j) {
      if (lhs.labels[i] == rhs.labels[j]) {
        lm.push_back(i);
        rm.push_back(j);
      }
    }
  }
  LabeledTensor out;
  out.t = tensor_contract(lhs.t, lm, rhs.t, rm);
  for (std::size_t i = 0; i < lhs.labels.size(); ++i) {
    if (std::find(lm.begin(), lm.end(), i) == lm.end()) {
      out.labels.push_back(lhs.labels[i]);
    }
  }
  for (std::size_t j = 0; j < rhs.labels.size(); ++j) {
    if (std::find(rm.begin(), rm.end(), j) == rm.end()) {
      out.labels.push_back(rhs.labels[j]);
    }
  }
  return out;
}

DenseTensor arrange(const LabeledTensor& x, const std::vector<Label>& order) {
  std::vector<std::size_t> perm;
  for (const Label& l : order) {
    const auto it = std::find(x.labels.begin(), x.labels.end(), l);
    perm.push_back(static_cast<std::size_t>(it - x.labels.begin()));
  }
  return generalized_transpose(x.t, perm);
}

// Left-to-right contraction of every node except `skip` (pass nodes.size()
// to keep all of them).
LabeledTensor contract_chain(std::span<const DenseTensor> nodes,
                             std::size_t skip) {
  LabeledTensor acc;
  bool started = false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i == skip) continue;
    if (!started) {
      acc = labeled_node(nodes[i], i);
      started = true;
    } else {
      acc = contract_shared(acc, labeled_node(nodes[i], i));
    }
  }
  return acc;
}

}  // namespace

DenseTensor fctn_compose(std::span<const DenseTensor> nodes) {
  check_nodes(nodes);
  const LabeledTensor acc = contract_chain(nodes, nodes.size());
  std::vector<Label> order;
  for (std::size_t n = 0; n < nodes.size(); ++n) order.push_back({n, n});
  return arrange(acc, order);
}

std::vector<DenseTensor> latent_nodes(const LmtnModel& model) {
  std::vector<DenseTensor> out;
  out.reserve(model.cores.size());
  for (std::size_t n = 0; n < model.cores.size(); ++n) {
    out.push_back(mode_n_product(model.cores[n], model.mats[n], n));
  }
  return out;
}

DenseTensor lmtn_compose(const LmtnModel& model) {
  model.validate();
  DenseTensor x = fctn_compose(model.cores);
  for (std::size_t n = 0; n < model.order(); ++n) {
    x = mode_n_product(x, model.mats[n], n);
  }
  return x;
}

DenseTensor compose_excluding(std::span<const DenseTensor> nodes,
                              std::size_t k) {
  check_nodes(nodes);
  const std::size_t n = nodes.size();
  if (n < 2) throw ShapeError("compose_excluding needs at least two nodes");
  if (k >= n) throw ShapeError("excluded node index out of range");
  const LabeledTensor acc = contract_chain(nodes, k);
  std::vector<Label> order;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == k) continue;
    if (j < k) {
      order.push_back({j, j});
      order.push_back(node_label(j, k));
    } else {
      order.push_back(node_label(j, k));
      order.push_back({j, j});
    }
  }
  return arrange(acc, order);
}

ModeSequence excluding_sequence(std::size_t order, std::size_t k) {
  // With 1-based i over the N-1 remaining nodes, rows take composite modes
  // 2i (i < k) or 2i-1 (i >= k) and columns the complementary ones.
  ModeSequence seq;
  const std::size_t m = order - 1;
  for (std::size_t i = 1; i <= m; ++i) {
    seq.perm.push_back((i < k + 1 ? 2 * i : 2 * i - 1) - 1);
  }
  for (std::size_t i = 1; i <= m; ++i) {
    seq.perm.push_back((i < k + 1 ? 2 * i - 1 : 2 * i) - 1);
  }
  seq.split = m;
  return seq;
}

Matrix subchain_unfold_excluding(std::span<const DenseTensor> nodes,
                                 std::size_t k) {
  const DenseTensor y = compose_excluding(nodes, k);
  return generalized_unfold(y, excluding_sequence(nodes.size(), k));
}

std::size_t count_parameters(const LmtnModel& model) {
  std::size_t total = 0;
  for (const auto& c : model.cores) total += c.size();
  for (const auto& m : model.mats) total += static_cast<std::size_t>(m.size());
  return total;
}

namespace {
std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}
}  // namespace

std::size_t closed_form_count(std::size_t order, std::size_t size,
                              std::size_t edge_rank, std::size_t diag_rank) {
  return order * diag_rank * ipow(edge_rank, order - 1) +
         order * size * diag_rank;
}

std::size_t fctn_closed_form_count(std::size_t order, std::size_t size,
                                   std::size_t edge_rank) {
  return order * size * ipow(edge_rank, order - 1);
}

RankMatrix permute_rank(const RankMatrix& r,
                        std::span<const std::size_t> perm) {
  if (!is_permutation(perm, r.order())) {
    throw ShapeError("permute_rank: not a permutation");
  }
  RankMatrix out(r.order());
  for (std::size_t i = 0; i < r.order(); ++i) {
    for (std::size_t j = 0; j < r.order(); ++j) {
      out.set(i, j, r(perm[i], perm[j]));
    }
  }
  return out;
}

LmtnModel permute_model(const LmtnModel& model,
                        std::span<const std::size_t> perm) {
  if (!is_permutation(perm, model.order())) {
    throw ShapeError("permute_model: not a permutation");
  }
  LmtnModel out;
  out.rank = permute_rank(model.rank, perm);
  for (std::size_t k = 0; k < model.order(); ++k) {
    out.shape.push_back(model.shape[perm[k]]);
    out.cores.push_back(generalized_transpose(model.cores[perm[k]], perm));
    out.mats.push_back(model.mats[perm[k]]);
  }
  return out;
}

}  // namespace lmtn
