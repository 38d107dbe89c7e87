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

#include <ostream>
#include <string>
#include <vector>

#include "gridsec/grid_model.hpp"

namespace gridsec {

struct VulnerableNode {
  NodeId node = 0;
  double path_reactance = 0.0;   // ohm
  double worst_case_sup = 0.0;   // V^2
};

/// Consumers ordered by path reactance, largest first, ties by id.
std::vector<VulnerableNode> rank_vulnerable_nodes(const PlanningInstance& instance, const Plan& plan,
                                                  std::size_t top_k, double c0);

struct SecurityVerdict {
  bool secure = true;
  double margin = 0.0;          // y_bar - max deviation, V^2
  double max_deviation = 0.0;   // V^2
  NodeId critical_node = 0;
};

/// max_i 2 C0 pathX(i) <= y_bar, against the instance's overvoltage band.
SecurityVerdict security_check(const PlanningInstance& instance, const Plan& plan, double c0);
/// Same test against an explicit bound.
SecurityVerdict security_check(const PlanningInstance& instance, const Plan& plan, double c0,
                               double y_bar);

struct TolerableAttack {
  double c0_max = 0.0;       // surrogate bound, W-scale
  double apparent_kw = 0.0;  // C = C0 / sqrt(m^2 + 1)
  double active_kw = 0.0;    // m C0 / (m^2 + 1)
};

TolerableAttack tolerable_attack_power(const PlanningInstance& instance, const Plan& plan);

struct VulnerabilityReport {
  std::vector<VulnerableNode> ranking;
  double c0 = 0.0;
  double y_bar = 0.0;
  TolerableAttack tolerable;
  bool secure_under_c0 = true;
};

VulnerabilityReport assess(const PlanningInstance& instance, const Plan& plan, double c0,
                           std::size_t top_k);
std::string report_to_json(const VulnerabilityReport& report);
void print_report(std::ostream& out, const VulnerabilityReport& report);

struct LabeledPlan {
  std::string label;
  Plan plan;
};

struct SweepRow {
  double c0 = 0.0;
  std::string label;
  double max_y = 0.0;
  bool tolerable = true;
};

/// Largest worst-case deviation per plan and budget.
std::vector<SweepRow> budget_sweep(const PlanningInstance& instance,
                                   const std::vector<LabeledPlan>& plans,
                                   const std::vector<double>& c0_grid);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace gridsec
