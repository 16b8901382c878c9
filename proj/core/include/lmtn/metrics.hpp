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


#ifndef LMTN_METRICS_HPP_
#define LMTN_METRICS_HPP_

#include "lmtn/model.hpp"
#include "lmtn/tensor.hpp"

namespace lmtn {

inline constexpr double kPsnrCapDb = 200.0;

// ||estimate - truth||_F / ||truth||_F. Throws NumericalError when truth is
// the zero tensor.
double rse(const DenseTensor& estimate, const DenseTensor& truth);

double mean_squared_error(const DenseTensor& estimate,
                          const DenseTensor& truth);

// 10 log10(peak^2 / MSE), never above kPsnrCapDb.
double psnr(const DenseTensor& estimate, const DenseTensor& truth,
            double peak = 1.0);

struct SsimResult {
  double value = 1.0;
  // Set when a slice was smaller than the 11x11 window and was scored with a
  // single uniform window covering the whole slice.
  bool window_fallback = false;
};

// Mean SSIM over all frontal slices (modes 0 and 1), 11x11 Gaussian window
// with sigma 1.5, C1 = (0.01 L)^2, C2 = (0.03 L)^2, L = peak.
SsimResult ssim_detailed(const DenseTensor& estimate, const DenseTensor& truth,
                         double peak = 1.0);
double ssim(const DenseTensor& estimate, const DenseTensor& truth,
            double peak = 1.0);

// Parameters held by the model divided by the element count of shape.
double compression_ratio(const LmtnModel& model, const Shape& shape);

}  // namespace lmtn

#endif  // LMTN_METRICS_HPP_
