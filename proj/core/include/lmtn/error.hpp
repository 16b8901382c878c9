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


#ifndef LMTN_ERROR_HPP_
#define LMTN_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace lmtn {

// Raised when operand shapes, mode indices or rank arrays violate a
// function's contract.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by the dense kernels when a system is singular beyond repair, an
// input is non-finite, or a residual check fails.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// Malformed or truncated files and configuration documents.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lmtn

#endif  // LMTN_ERROR_HPP_
