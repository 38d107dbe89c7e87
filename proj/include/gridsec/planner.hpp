// Copyright 2026 The gridsec Authors
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

#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gridsec/grid_model.hpp"

namespace gridsec {

struct SolveOptions {
  bool security_enabled = false;
  double c0 = 0.0;
  double time_limit_s = 600.0;
  std::size_t node_cap_for_oracle = 10;
  /// The search is fully deterministic; the seed only tags logs and
  /// generated instances.
  std::uint64_t deterministic_seed = 0;
  /// Line-oriented solver log (incumbent/bound trace), optional.
  std::ostream* log = nullptr;
};

enum class SolveStatus { Optimal, Infeasible, TimeLimit };

struct SolveResult {
  Plan plan;
  bool has_plan = false;
  double objective = 0.0;  // US$
  SolveStatus status = SolveStatus::Infeasible;
  std::uint64_t explored_nodes = 0;
  double wall_time_s = 0.0;
};

class OracleCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest admissible path reactance under the planning bound, ohm.
double path_reactance_limit(const PlanningInstance& instance, double c0);

/// Depth-first branch-and-bound over edge inclusion decisions (edges by
/// length, then id). Bounds: committed length plus a minimum spanning forest
/// completion; with security enabled, a branch dies once a consumer's
/// committed path reactance, or its shortest possible path, exceeds the limit.
SolveResult solve_exact(const PlanningInstance& instance, const SolveOptions& options);

/// Exhaustive enumeration of oriented selections of N_b - N_bS arcs,
/// filtered by radiality, flow limits and the security bound.
SolveResult enumerate_forests(const PlanningInstance& instance, const SolveOptions& options);

std::string to_string(SolveStatus status);

}  // namespace gridsec
