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


#ifndef LMTN_TOOLS_RUN_CONFIG_HPP_
#define LMTN_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "lmtn/model.hpp"
#include "lmtn/solvers.hpp"

namespace lmtn::cli {

struct RunConfig {
  SolverKind solver = SolverKind::kSvd;
  std::optional<RankMatrix> rank;
  std::optional<RankMatrix> rank_max;
  double rho = 0.1;
  double tau = 0.1;
  double alpha = 0.1;
  double tol = 1e-6;
  int maxit = 300;
  std::uint64_t seed = 0;
  double missing_rate = 0.0;
  std::string input;
  std::optional<std::string> mask;
  std::string output = "lmtn_out";
  // Only read by `gen`.
  std::optional<Shape> shape;

  // The rank the solver runs with: rank_max for AR (falling back to rank),
  // rank otherwise.
  const RankMatrix& solver_rank() const;
  SolverConfig to_solver_config(const Shape& data_shape) const;
};

// Parses a JSON document. Unknown keys and ill-typed values throw
// FormatError. LMTN_SEED, when set, replaces the seed.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace lmtn::cli

#endif  // LMTN_TOOLS_RUN_CONFIG_HPP_
