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


#ifndef LMTN_IO_HPP_
#define LMTN_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lmtn/mask.hpp"
#include "lmtn/tensor.hpp"

namespace lmtn {

inline constexpr char kTensorMagic[4] = {'L', 'M', 'T', 'N'};
inline constexpr std::uint8_t kTensorFormatVersion = 1;

// Binary tensor file: "LMTN", u8 version, u32 order, order x u64 dims, then
// the column-major f64 payload. All integers and doubles are little-endian.
std::vector<std::uint8_t> encode_tensor(const DenseTensor& x);
DenseTensor decode_tensor(const std::vector<std::uint8_t>& bytes);

DenseTensor read_tensor(const std::filesystem::path& path);
void write_tensor(const DenseTensor& x, const std::filesystem::path& path);

// Masks are tensor files holding 0.0 / 1.0.
ObservationMask read_mask(const std::filesystem::path& path);
void write_mask(const ObservationMask& mask, const std::filesystem::path& path);

// 8-bit binary PGM (P5) -> H x W, PPM (P6) -> H x W x 3, scaled by 1/255.
DenseTensor import_image(const std::filesystem::path& path);
// Inverse of import_image. Values are clamped to [0, 1] and rounded.
void export_image(const DenseTensor& x, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::vector<std::uint8_t>& bytes,
                      const std::filesystem::path& path);

}  // namespace lmtn

#endif  // LMTN_IO_HPP_
