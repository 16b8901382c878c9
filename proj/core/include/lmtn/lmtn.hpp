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


#ifndef LMTN_LMTN_HPP_
#define LMTN_LMTN_HPP_

#include "lmtn/error.hpp"
#include "lmtn/experiments.hpp"
#include "lmtn/io.hpp"
#include "lmtn/linalg.hpp"
#include "lmtn/mask.hpp"
#include "lmtn/metrics.hpp"
#include "lmtn/model.hpp"
#include "lmtn/solvers.hpp"
#include "lmtn/tensor.hpp"

#endif  // LMTN_LMTN_HPP_
