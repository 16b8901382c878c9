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


#include "run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lmtn/error.hpp"

namespace lmtn::cli {
namespace {

using nlohmann::json;

RankMatrix parse_rank(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw FormatError(std::string(key) + " must be a non-empty N x N array");
  }
  std::vector<std::vector<std::size_t>> rows;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != j.size()) {
      throw FormatError(std::string(key) + " must be square");
    }
    std::vector<std::size_t> r;
    for (const auto& v : row) {
      if (!v.is_number_unsigned()) {
        throw FormatError(std::string(key) + " entries must be positive integers");
      }
      r.push_back(v.get<std::size_t>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return RankMatrix(rows);
  } catch (const ShapeError& e) {
    throw FormatError(std::string(key) + ": " + e.what());
  }
}

double number(const json& j, const char* key) {
  if (!j.is_number()) throw FormatError(std::string(key) + " must be a number");
  return j.get<double>();
}

std::string text(const json& j, const char* key) {
  if (!j.is_string()) throw FormatError(std::string(key) + " must be a string");
  return j.get<std::string>();
}

}  // namespace

const RankMatrix& RunConfig::solver_rank() const {
  if (solver == SolverKind::kAr && rank_max) return *rank_max;
  if (rank) return *rank;
  throw FormatError(solver == SolverKind::kAr
                        ? "config needs rank_max (or rank) for the ar solver"
                        : "config needs rank");
}

SolverConfig RunConfig::to_solver_config(const Shape& data_shape) const {
  SolverConfig c;
  c.rho = rho;
  c.tau = tau;
  c.alpha = alpha;
  c.tol = tol;
  c.maxit = maxit;
  c.rank = solver_rank();
  c.seed = seed;
  c.validate(solver, data_shape);
  return c;
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("config must be a JSON object");

  static const std::set<std::string> kKnown = {
      "solver", "rank", "rank_max", "rho", "tau", "alpha", "tol", "maxit",
      "seed", "missing_rate", "input", "mask", "output", "shape"};
  for (const auto& [key, _] : doc.items()) {
    if (!kKnown.count(key)) throw FormatError("unknown config key \"" + key + "\"");
  }

  RunConfig c;
  if (doc.contains("solver")) c.solver = solver_from_string(text(doc["solver"], "solver"));
  if (doc.contains("rank")) c.rank = parse_rank(doc["rank"], "rank");
  if (doc.contains("rank_max")) c.rank_max = parse_rank(doc["rank_max"], "rank_max");
  if (doc.contains("rho")) c.rho = number(doc["rho"], "rho");
  if (doc.contains("tau")) c.tau = number(doc["tau"], "tau");
  if (doc.contains("alpha")) c.alpha = number(doc["alpha"], "alpha");
  if (doc.contains("tol")) c.tol = number(doc["tol"], "tol");
  if (doc.contains("maxit")) {
    if (!doc["maxit"].is_number_integer()) throw FormatError("maxit must be an integer");
    c.maxit = doc["maxit"].get<int>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw FormatError("seed must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("missing_rate")) c.missing_rate = number(doc["missing_rate"], "missing_rate");
  if (doc.contains("input")) c.input = text(doc["input"], "input");
  if (doc.contains("mask")) c.mask = text(doc["mask"], "mask");
  if (doc.contains("output")) c.output = text(doc["output"], "output");
  if (doc.contains("shape")) {
    const auto& s = doc["shape"];
    if (!s.is_array() || s.empty()) throw FormatError("shape must be a non-empty array");
    Shape shape;
    for (const auto& v : s) {
      if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
        throw FormatError("shape entries must be positive integers");
      }
      shape.push_back(v.get<std::size_t>());
    }
    c.shape = std::move(shape);
  }
  if (!(c.missing_rate >= 0.0 && c.missing_rate < 1.0)) {
    throw FormatError("missing_rate must lie in [0, 1)");
  }

  if (const char* env = std::getenv("LMTN_SEED"); env != nullptr && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw FormatError("LMTN_SEED is not an integer");
    c.seed = v;
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace lmtn::cli
