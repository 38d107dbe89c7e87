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

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridsec/grid_model.hpp"

namespace gridsec {

struct ArcFlow {
  Arc arc;
  double p_kw = 0.0;
  double q_kvar = 0.0;
};

/// Linearized dist-flow solution on a fixed plan. Flows in kW/kVAr.
struct FlowSolution {
  std::vector<ArcFlow> arcs;
  std::map<NodeId, double> p_sub_kw;
  std::map<NodeId, double> q_sub_kvar;

  const ArcFlow* find(const Arc& arc) const;
};

/// Squared voltage per node, V^2.
using VoltageProfile = std::map<NodeId, double>;

class FlowError : public std::runtime_error {
 public:
  FlowError(const std::string& what, Arc arc) : std::runtime_error(what), arc_(arc) {}
  const Arc& arc() const { return arc_; }

 private:
  Arc arc_;
};

/// Arc flow = net demand of the subtree below it. Throws FlowError when a
/// subtree exports power, which the nonnegative-flow convention forbids.
FlowSolution compute_flows(const PlanningInstance& instance, const Plan& plan);

/// Root-to-leaf propagation of u_i - u_j = 2 (R P + X Q), substations at v0^2.
VoltageProfile compute_voltages(const PlanningInstance& instance, const Plan& plan,
                                const FlowSolution& flows);

/// Squared-voltage drop across one arc, V^2, for flows in kW/kVAr.
double voltage_drop_v2(const CandidateEdge& edge, double p_kw, double q_kvar);

enum class LimitKind { FlowNegative, FlowAboveBigM, FlowOnUnselected, VoltageLow, VoltageHigh };

struct LimitViolation {
  LimitKind kind;
  std::string message;
  std::optional<Arc> arc;
  std::optional<NodeId> node;
  double value = 0.0;
};

struct StaticLimitReport {
  std::vector<LimitViolation> violations;
  bool ok() const { return violations.empty(); }
};

StaticLimitReport check_static_limits(const PlanningInstance& instance, const Plan& plan,
                                      const FlowSolution& flows, const VoltageProfile& u);

void write_flow_csv(std::ostream& out, const FlowSolution& flows);
void write_voltage_csv(std::ostream& out, const VoltageProfile& u);

}  // namespace gridsec
