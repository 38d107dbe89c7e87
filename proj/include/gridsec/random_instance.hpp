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
#include <random>

#include "gridsec/grid_model.hpp"

namespace gridsec {

enum class SecurityRegime {
  /// Attack budget far below anything that could bind.
  Slack,
  /// Budget chosen so the limit falls between the best achievable and the
  /// minimum-length plan's worst path reactance; always feasible.
  Binding,
  /// Budget below what any plan tolerates; always infeasible.
  Infeasible,
};

struct RandomInstanceOptions {
  std::size_t consumers = 6;
  std::size_t substations = 1;
  /// Candidate edges added on top of a random spanning tree.
  std::size_t extra_edges = 4;
  /// Draw per-edge impedances (same r/x ratio) instead of inheriting.
  bool random_impedance = true;
  /// Draw per-consumer integral gains.
  bool random_gains = true;
  SecurityRegime regime = SecurityRegime::Binding;
};

/// Random valid planning instance. Consumers are ids 1..n, substations follow.
/// Lengths are whole kilometres so plan costs compare exactly.
PlanningInstance random_instance(const RandomInstanceOptions& options, std::mt19937_64& rng);

/// Uniformly shuffled Kruskal spanning forest of the candidate graph,
/// oriented away from the substations.
Plan random_radial_plan(const PlanningInstance& instance, std::mt19937_64& rng);

/// Minimum length spanning forest (ties by edge order), oriented.
Plan minimum_length_plan(const PlanningInstance& instance);

/// Smallest achievable maximum path reactance over all radial plans
/// (shortest-path forest in reactance), ohm.
double min_max_path_reactance(const PlanningInstance& instance);

double max_path_reactance(const PlanningInstance& instance, const Plan& plan);

}  // namespace gridsec
