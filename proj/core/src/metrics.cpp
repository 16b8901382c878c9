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


#include "lmtn/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lmtn/error.hpp"

namespace lmtn {
namespace {

void check_same_shape(const DenseTensor& a, const DenseTensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("metric operands differ in shape");
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow * kWindow> gaussian_window() {
  std::array<double, kWindow * kWindow> w{};
  double total = 0.0;
  const int half = kWindow / 2;
  for (int i = 0; i < kWindow; ++i) {
    for (int j = 0; j < kWindow; ++j) {
      const double di = i - half;
      const double dj = j - half;
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      w[static_cast<std::size_t>(i * kWindow + j)] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;
  return w;
}

double ssim_term(double mx, double my, double vx, double vy, double cxy,
                 double c1, double c2) {
  return ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
         ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

double rse(const DenseTensor& estimate, const DenseTensor& truth) {
  check_same_shape(estimate, truth);
  const double denom = frobenius_norm(truth);
  if (denom == 0.0) throw NumericalError("rse: reference tensor has zero norm");
  return frobenius_norm(estimate - truth) / denom;
}

double mean_squared_error(const DenseTensor& estimate,
                          const DenseTensor& truth) {
  check_same_shape(estimate, truth);
  return squared_norm(estimate - truth) / static_cast<double>(truth.size());
}

double psnr(const DenseTensor& estimate, const DenseTensor& truth,
            double peak) {
  if (!(peak > 0.0)) throw ShapeError("psnr: peak must be positive");
  const double mse = mean_squared_error(estimate, truth);
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse));
}

SsimResult ssim_detailed(const DenseTensor& estimate, const DenseTensor& truth,
                         double peak) {
  check_same_shape(estimate, truth);
  if (truth.order() < 2) throw ShapeError("ssim needs order >= 2");
  const std::size_t h = truth.dim(0);
  const std::size_t w = truth.dim(1);
  const std::size_t slices = truth.size() / (h * w);
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);

  SsimResult result;
  const bool fallback = h < static_cast<std::size_t>(kWindow) ||
                        w < static_cast<std::size_t>(kWindow);
  result.window_fallback = fallback;
  const auto window = gaussian_window();
  const auto ex = estimate.data();
  const auto ty = truth.data();

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < slices; ++s) {
    const std::size_t base = s * h * w;
    auto x = [&](std::size_t i, std::size_t j) { return ex[base + i + j * h]; };
    auto y = [&](std::size_t i, std::size_t j) { return ty[base + i + j * h]; };
    if (fallback) {
      const double n = static_cast<double>(h * w);
      double mx = 0.0, my = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        for (std::size_t i = 0; i < h; ++i) {
          mx += x(i, j);
          my += y(i, j);
        }
      }
      mx /= n;
      my /= n;
      double vx = 0.0, vy = 0.0, cxy = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        for (std::size_t i = 0; i < h; ++i) {
          const double dx = x(i, j) - mx;
          const double dy = y(i, j) - my;
          vx += dx * dx;
          vy += dy * dy;
          cxy += dx * dy;
        }
      }
      sum += ssim_term(mx, my, vx / n, vy / n, cxy / n, c1, c2);
      ++count;
      continue;
    }
    for (std::size_t j0 = 0; j0 + kWindow <= w; ++j0) {
      for (std::size_t i0 = 0; i0 + kWindow <= h; ++i0) {
        double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
        for (int dj = 0; dj < kWindow; ++dj) {
          for (int di = 0; di < kWindow; ++di) {
            const double g = window[static_cast<std::size_t>(di * kWindow + dj)];
            const double xv = x(i0 + di, j0 + dj);
            const double yv = y(i0 + di, j0 + dj);
            mx += g * xv;
            my += g * yv;
            sxx += g * xv * xv;
            syy += g * yv * yv;
            sxy += g * xv * yv;
          }
        }
        sum += ssim_term(mx, my, sxx - mx * mx, syy - my * my, sxy - mx * my,
                         c1, c2);
        ++count;
      }
    }
  }
  result.value = sum / static_cast<double>(count);
  return result;
}

double ssim(const DenseTensor& estimate, const DenseTensor& truth,
            double peak) {
  return ssim_detailed(estimate, truth, peak).value;
}

double compression_ratio(const LmtnModel& model, const Shape& shape) {
  return static_cast<double>(count_parameters(model)) /
         static_cast<double>(shape_size(shape));
}

}  // namespace lmtn
