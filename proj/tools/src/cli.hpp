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


#ifndef LMTN_TOOLS_CLI_HPP_
#define LMTN_TOOLS_CLI_HPP_

#include <string>
#include <vector>

#include "lmtn/solvers.hpp"
#include "lmtn/tensor.hpp"

namespace lmtn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kMetricsCsvHeader =
    "iter,objective,rel_change,rse,psnr,ssim,wall_ms";

// Runs the lmtn command line. Diagnostics go to standard error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

std::string report_to_json(const SolverReport& report, bool timing);

}  // namespace lmtn::cli

#endif  // LMTN_TOOLS_CLI_HPP_
