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


#include "lmtn/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "lmtn/error.hpp"

namespace lmtn {
namespace {

constexpr std::size_t kHeaderFixed = 4 + 1 + 4;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(p[i]) << (8 * i);
  }
  return value;
}

void require_bytes(std::size_t have, std::size_t need, const char* what) {
  if (have < need) {
    throw FormatError(std::string("truncated tensor file: ") + what +
                      " is missing " + std::to_string(need - have) +
                      " byte(s)");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const DenseTensor& x) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderFixed + 8 * x.order() + 8 * x.size());
  out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
  out.push_back(kTensorFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(x.order()));
  for (std::size_t d : x.shape()) put_le<std::uint64_t>(out, d);
  for (double v : x.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

DenseTensor decode_tensor(const std::vector<std::uint8_t>& bytes) {
  require_bytes(bytes.size(), kHeaderFixed, "header");
  if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
    throw FormatError("bad magic: not an LMTN tensor file");
  }
  if (bytes[4] != kTensorFormatVersion) {
    throw FormatError("unsupported tensor file version " +
                      std::to_string(bytes[4]));
  }
  const auto order = get_le<std::uint32_t>(bytes.data() + 5);
  if (order == 0) throw FormatError("tensor file declares order 0");
  const std::size_t dims_end = kHeaderFixed + 8 * std::size_t{order};
  require_bytes(bytes.size(), dims_end, "dimension list");
  Shape shape(order);
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < order; ++i) {
    const auto d = get_le<std::uint64_t>(bytes.data() + kHeaderFixed + 8 * i);
    if (d == 0) throw FormatError("tensor file has a zero dimension");
    if (d > std::numeric_limits<std::size_t>::max() / total ||
        d * total > std::numeric_limits<std::size_t>::max() / 8) {
      throw FormatError("tensor file dimensions overflow");
    }
    total *= d;
    shape[i] = static_cast<std::size_t>(d);
  }
  require_bytes(bytes.size() - dims_end, 8 * total, "payload");
  if (bytes.size() - dims_end != 8 * total) {
    throw FormatError("tensor file has " +
                      std::to_string(bytes.size() - dims_end - 8 * total) +
                      " trailing byte(s)");
  }
  std::vector<double> values(total);
  for (std::size_t i = 0; i < total; ++i) {
    values[i] = std::bit_cast<double>(
        get_le<std::uint64_t>(bytes.data() + dims_end + 8 * i));
  }
  return DenseTensor(std::move(shape), std::move(values));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_bytes(const std::vector<std::uint8_t>& bytes,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  return decode_tensor(read_file_bytes(path));
}

void write_tensor(const DenseTensor& x, const std::filesystem::path& path) {
  write_file_bytes(encode_tensor(x), path);
}

ObservationMask read_mask(const std::filesystem::path& path) {
  const DenseTensor t = read_tensor(path);
  std::vector<std::uint8_t> flags(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0 && t[i] != 1.0) {
      throw FormatError("mask entry " + std::to_string(i) +
                        " is neither 0 nor 1");
    }
    flags[i] = t[i] == 1.0;
  }
  return ObservationMask(t.shape(), std::move(flags));
}

void write_mask(const ObservationMask& mask,
                const std::filesystem::path& path) {
  std::vector<double> values(mask.flags().begin(), mask.flags().end());
  write_tensor(DenseTensor(mask.shape(), std::move(values)), path);
}

namespace {

// Reads the next header token of a netpbm file, skipping comments.
std::size_t read_header_int(const std::vector<std::uint8_t>& b,
                            std::size_t& pos) {
  while (pos < b.size()) {
    if (std::isspace(b[pos])) {
      ++pos;
    } else if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || !std::isdigit(b[pos])) {
    throw FormatError("malformed image header");
  }
  std::size_t v = 0;
  while (pos < b.size() && std::isdigit(b[pos])) {
    v = v * 10 + static_cast<std::size_t>(b[pos] - '0');
    if (v > (std::size_t{1} << 31)) throw FormatError("image header value too large");
    ++pos;
  }
  return v;
}

}  // namespace

DenseTensor import_image(const std::filesystem::path& path) {
  const auto b = read_file_bytes(path);
  if (b.size() < 2 || b[0] != 'P' || (b[1] != '5' && b[1] != '6')) {
    throw FormatError("unsupported image format (need binary P5 or P6)");
  }
  const std::size_t channels = b[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  const std::size_t width = read_header_int(b, pos);
  const std::size_t height = read_header_int(b, pos);
  const std::size_t maxval = read_header_int(b, pos);
  if (width == 0 || height == 0) throw FormatError("image has zero size");
  if (maxval != 255) throw FormatError("only 8-bit images (maxval 255) are supported");
  if (pos >= b.size() || !std::isspace(b[pos])) {
    throw FormatError("malformed image header");
  }
  ++pos;
  const std::size_t need = width * height * channels;
  if (b.size() - pos < need) {
    throw FormatError("truncated image: missing " +
                      std::to_string(need - (b.size() - pos)) + " byte(s)");
  }
  Shape shape = channels == 1 ? Shape{height, width} : Shape{height, width, 3};
  DenseTensor x(shape);
  const std::size_t plane = height * width;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t ch = 0; ch < channels; ++ch) {
        const auto byte = b[pos + (r * width + c) * channels + ch];
        x[r + c * height + ch * plane] = static_cast<double>(byte) / 255.0;
      }
    }
  }
  return x;
}

void export_image(const DenseTensor& x, const std::filesystem::path& path) {
  const bool gray = x.order() == 2;
  if (!gray && !(x.order() == 3 && x.dim(2) == 3)) {
    throw ShapeError("export_image needs an H x W or H x W x 3 tensor");
  }
  const std::size_t height = x.dim(0);
  const std::size_t width = x.dim(1);
  const std::size_t channels = gray ? 1 : 3;
  const std::string header = std::string(gray ? "P5" : "P6") + "\n" +
                             std::to_string(width) + " " +
                             std::to_string(height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const std::size_t plane = height * width;
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t ch = 0; ch < channels; ++ch) {
        double v = x[r + c * height + ch * plane];
        v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
      }
    }
  }
  write_file_bytes(out, path);
}

}  // namespace lmtn
