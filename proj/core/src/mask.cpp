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


#include "lmtn/mask.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "lmtn/error.hpp"

namespace lmtn {

ObservationMask::ObservationMask(Shape shape, bool observed)
    : shape_(std::move(shape)),
      flags_(shape_size(shape_), observed ? 1 : 0) {}

ObservationMask::ObservationMask(Shape shape, std::vector<std::uint8_t> flags)
    : shape_(std::move(shape)), flags_(std::move(flags)) {
  if (flags_.size() != shape_size(shape_)) {
    throw ShapeError("mask flag count does not match its shape");
  }
}

std::size_t ObservationMask::observed_count() const {
  std::size_t n = 0;
  for (auto f : flags_) n += f != 0;
  return n;
}

ObservationMask ObservationMask::transposed(
    std::span<const std::size_t> perm) const {
  std::vector<double> as_values(flags_.begin(), flags_.end());
  const DenseTensor t =
      generalized_transpose(DenseTensor(shape_, std::move(as_values)), perm);
  std::vector<std::uint8_t> flags(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) flags[i] = t[i] != 0.0;
  return ObservationMask(t.shape(), std::move(flags));
}

ObservationMask sample_mask(const Shape& shape, double missing_rate,
                            std::uint64_t seed) {
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
    throw ShapeError("missing rate must lie in [0, 1)");
  }
  const std::size_t total = shape_size(shape);
  const auto keep = static_cast<std::size_t>(
      std::llround((1.0 - missing_rate) * static_cast<double>(total)));

  // Partial Fisher-Yates: the first `keep` slots end up a uniform sample.
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < keep && i + 1 < total; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(idx[i], idx[pick(gen)]);
  }
  ObservationMask mask(shape, false);
  for (std::size_t i = 0; i < keep; ++i) mask.set(idx[i], true);
  return mask;
}

namespace {
DenseTensor select(const DenseTensor& x, const ObservationMask& mask,
                   bool keep_observed) {
  if (x.shape() != mask.shape()) {
    throw ShapeError("tensor and mask shapes differ");
  }
  DenseTensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.observed(i) != keep_observed) out[i] = 0.0;
  }
  return out;
}
}  // namespace

DenseTensor project(const DenseTensor& x, const ObservationMask& mask) {
  return select(x, mask, true);
}

DenseTensor project_complement(const DenseTensor& x,
                               const ObservationMask& mask) {
  return select(x, mask, false);
}

}  // namespace lmtn
