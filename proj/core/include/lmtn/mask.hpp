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


#ifndef LMTN_MASK_HPP_
#define LMTN_MASK_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lmtn/tensor.hpp"

namespace lmtn {

// The observed index set over a fixed shape, one flag per column-major
// linear index.
class ObservationMask {
 public:
  ObservationMask() = default;
  ObservationMask(Shape shape, bool observed);
  ObservationMask(Shape shape, std::vector<std::uint8_t> flags);

  static ObservationMask full(Shape shape) { return {std::move(shape), true}; }
  static ObservationMask empty(Shape shape) {
    return {std::move(shape), false};
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return flags_.size(); }
  bool observed(std::size_t linear) const { return flags_[linear] != 0; }
  void set(std::size_t linear, bool value) { flags_[linear] = value ? 1 : 0; }
  std::size_t observed_count() const;
  const std::vector<std::uint8_t>& flags() const { return flags_; }

  ObservationMask transposed(std::span<const std::size_t> perm) const;

  friend bool operator==(const ObservationMask&,
                         const ObservationMask&) = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> flags_;
};

// Observes exactly round((1 - missing_rate) * total) entries drawn uniformly
// without replacement.
ObservationMask sample_mask(const Shape& shape, double missing_rate,
                            std::uint64_t seed);

// Keeps observed entries, zeroes the rest.
DenseTensor project(const DenseTensor& x, const ObservationMask& mask);
// Keeps unobserved entries, zeroes the rest.
DenseTensor project_complement(const DenseTensor& x,
                               const ObservationMask& mask);

}  // namespace lmtn

#endif  // LMTN_MASK_HPP_
