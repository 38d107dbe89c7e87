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

#include "gridsec/distflow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace gridsec {

const ArcFlow* FlowSolution::find(const Arc& arc) const {
  auto it = std::find_if(arcs.begin(), arcs.end(), [&](const ArcFlow& f) { return f.arc == arc; });
  return it == arcs.end() ? nullptr : &*it;
}

FlowSolution compute_flows(const PlanningInstance& instance, const Plan& plan) {
  const RadialForest forest(instance, plan);
  std::map<NodeId, double> p_below, q_below;
  const auto& order = forest.topological_order();
  // Leaves first: accumulate subtree net demand.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Node& n = instance.node(*it);
    if (n.is_substation()) continue;
    p_below[n.id] += n.net_p_kw();
    q_below[n.id] += n.net_q_kvar();
    const NodeId up = forest.parent_arc(n.id).from;
    if (!instance.is_substation(up)) {
      p_below[up] += p_below[n.id];
      q_below[up] += q_below[n.id];
    }
  }
  FlowSolution sol;
  for (NodeId s : instance.substations()) {
    sol.p_sub_kw[s] = 0.0;
    sol.q_sub_kvar[s] = 0.0;
  }
  for (const Arc& arc : plan.arcs()) {
    const double p = p_below[arc.to];
    const double q = q_below[arc.to];
    if (p < 0 || q < 0) {
      throw FlowError("negative flow on arc " + std::to_string(arc.from) + "->" +
                          std::to_string(arc.to) + ": subtree exports power",
                      arc);
    }
    sol.arcs.push_back(ArcFlow{arc, p, q});
    if (instance.is_substation(arc.from)) {
      sol.p_sub_kw[arc.from] += p;
      sol.q_sub_kvar[arc.from] += q;
    }
  }
  return sol;
}

double voltage_drop_v2(const CandidateEdge& edge, double p_kw, double q_kvar) {
  return 2.0 * (edge.resistance_ohm() * p_kw * 1e3 + edge.reactance_ohm() * q_kvar * 1e3);
}

VoltageProfile compute_voltages(const PlanningInstance& instance, const Plan& plan,
                                const FlowSolution& flows) {
  const RadialForest forest(instance, plan);
  VoltageProfile u;
  const double u0 = instance.security().u_rated();
  for (NodeId v : forest.topological_order()) {
    if (instance.is_substation(v)) {
      u[v] = u0;
      continue;
    }
    const Arc& arc = forest.parent_arc(v);
    const ArcFlow* f = flows.find(arc);
    const double p = f ? f->p_kw : 0.0;
    const double q = f ? f->q_kvar : 0.0;
    u[v] = u.at(arc.from) - voltage_drop_v2(instance.edge_of(arc), p, q);
  }
  return u;
}

StaticLimitReport check_static_limits(const PlanningInstance& instance, const Plan& plan,
                                      const FlowSolution& flows, const VoltageProfile& u) {
  StaticLimitReport report;
  const double big_m = instance.big_m_kw();
  auto arc_name = [](const Arc& a) { return std::to_string(a.from) + "->" + std::to_string(a.to); };
  for (const ArcFlow& f : flows.arcs) {
    const bool selected = plan.contains(f.arc);
    for (double value : {f.p_kw, f.q_kvar}) {
      if (!selected && value != 0.0) {
        report.violations.push_back({LimitKind::FlowOnUnselected,
                                     "flow on unselected arc " + arc_name(f.arc), f.arc, {}, value});
      } else if (value < 0.0) {
        report.violations.push_back({LimitKind::FlowNegative,
                                     "negative flow on arc " + arc_name(f.arc), f.arc, {}, value});
      } else if (value > big_m) {
        report.violations.push_back({LimitKind::FlowAboveBigM,
                                     "flow above M on arc " + arc_name(f.arc), f.arc, {}, value});
      }
    }
  }
  const auto& sec = instance.security();
  const double u_min = std::pow(sec.v_min_kv * 1e3, 2);
  const double u_max = std::pow(sec.v_max_kv * 1e3, 2);
  for (const auto& [node, value] : u) {
    if (value < u_min) {
      report.violations.push_back({LimitKind::VoltageLow,
                                   "voltage below v_min at node " + std::to_string(node), {}, node,
                                   value});
    } else if (value > u_max) {
      report.violations.push_back({LimitKind::VoltageHigh,
                                   "voltage above v_max at node " + std::to_string(node), {}, node,
                                   value});
    }
  }
  return report;
}

void write_flow_csv(std::ostream& out, const FlowSolution& flows) {
  out << "from,to,p_kw,q_kvar\n" << std::setprecision(10);
  for (const auto& f : flows.arcs) {
    out << f.arc.from << ',' << f.arc.to << ',' << f.p_kw << ',' << f.q_kvar << '\n';
  }
}

void write_voltage_csv(std::ostream& out, const VoltageProfile& u) {
  out << "node,u_v2,v_kv\n" << std::setprecision(12);
  for (const auto& [node, value] : u) {
    out << node << ',' << value << ',' << std::sqrt(std::max(value, 0.0)) / 1e3 << '\n';
  }
}

}  // namespace gridsec
