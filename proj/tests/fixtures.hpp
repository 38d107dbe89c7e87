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

// Small hand-built instances and brute-force reference computations shared by
// the unit tests and the acceptance suite.

#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gridsec/grid_model.hpp"
#include "gridsec/instance_io.hpp"

namespace gridsec::testing {

#ifndef GRIDSEC_DATA_DIR
#define GRIDSEC_DATA_DIR "data"
#endif

inline std::filesystem::path benchmark_path() {
  return std::filesystem::path(GRIDSEC_DATA_DIR) / "54node.json";
}

inline const PlanningInstance& benchmark() {
  static const PlanningInstance instance = load_instance(benchmark_path());
  return instance;
}

inline LineParams default_line() { return {0.3655, 0.2520}; }
inline EconParams default_econ() { return {5000.0, 450.0, 0.1, 10}; }
inline SecurityParams default_security(double c0 = 5.55e6) {
  return {15.0, 14.25, 15.75, c0, 1.0};
}

inline Node consumer(NodeId id, double p, double q, double gen_fraction = 0.0) {
  Node n;
  n.id = id;
  n.p_demand_kw = p;
  n.q_demand_kvar = q;
  n.p_gen_kw = gen_fraction * p;
  n.q_gen_kvar = gen_fraction * q;
  return n;
}

inline Node substation(NodeId id) {
  Node n;
  n.id = id;
  n.kind = NodeKind::Substation;
  return n;
}

inline CandidateEdge edge(NodeId a, NodeId b, double length_km) {
  CandidateEdge e;
  e.a = a;
  e.b = b;
  e.length_km = length_km;
  return e;
}

inline PlanningInstance make_instance(std::vector<Node> nodes, std::vector<CandidateEdge> edges,
                                      double c0 = 5.55e6, double big_m = 60000.0) {
  return PlanningInstance(std::move(nodes), std::move(edges), default_line(), default_econ(),
                          default_security(c0), big_m);
}

// Two substations S1 = 9, S2 = 10 and consumers 1..8, following the
// introductory ten-node planning example.
inline PlanningInstance ten_node_instance() {
  std::vector<Node> nodes;
  for (NodeId i = 1; i <= 8; ++i) nodes.push_back(consumer(i, 100.0 + 10 * i, 50.0 + 5 * i));
  nodes.push_back(substation(9));
  nodes.push_back(substation(10));
  std::vector<CandidateEdge> edges = {
      edge(9, 1, 1.0), edge(9, 2, 1.2), edge(9, 4, 0.8), edge(4, 3, 0.6), edge(7, 5, 0.9),
      edge(7, 6, 1.1), edge(10, 7, 1.3), edge(10, 8, 0.7), edge(1, 2, 0.5), edge(2, 3, 0.9),
      edge(3, 5, 1.4), edge(6, 8, 0.8), edge(5, 6, 0.6)};
  return make_instance(std::move(nodes), std::move(edges));
}

inline Plan ten_node_plan() {
  return Plan({{9, 1}, {9, 2}, {9, 4}, {4, 3}, {7, 5}, {7, 6}, {10, 7}, {10, 8}});
}

// One substation (id 3) and two consumers on a triangle of candidate lines.
inline PlanningInstance triangle_instance(double c0 = 5.55e6) {
  return make_instance({consumer(1, 200, 100), consumer(2, 150, 80), substation(3)},
                       {edge(3, 1, 2.0), edge(3, 2, 3.0), edge(1, 2, 1.5)}, c0);
}

// Independent path reactance: walk parent arcs upward from the node.
inline double naive_path_reactance(const PlanningInstance& instance, const Plan& plan, NodeId node) {
  std::map<NodeId, NodeId> parent;
  for (const Arc& a : plan.arcs()) parent[a.to] = a.from;
  double total = 0.0;
  std::set<NodeId> seen;
  while (!instance.is_substation(node)) {
    if (!seen.insert(node).second) return NAN;
    const NodeId up = parent.at(node);
    const auto k = instance.edge_between(up, node);
    total += instance.edges()[*k].x_ohm_per_km * instance.edges()[*k].length_km;
    node = up;
  }
  return total;
}

// Independent subtree net demand by recursive DFS over the plan's arcs.
inline std::pair<double, double> naive_subtree_demand(const PlanningInstance& instance,
                                                      const Plan& plan, NodeId root) {
  double p = 0.0, q = 0.0;
  if (!instance.is_substation(root)) {
    p = instance.node(root).p_demand_kw - instance.node(root).p_gen_kw;
    q = instance.node(root).q_demand_kvar - instance.node(root).q_gen_kvar;
  }
  for (const Arc& a : plan.arcs()) {
    if (a.from != root) continue;
    const auto [cp, cq] = naive_subtree_demand(instance, plan, a.to);
    p += cp;
    q += cq;
  }
  return {p, q};
}

// Present value factor by direct summation of the discounted terms.
inline double naive_present_value(double gamma, int years) {
  double sum = 0.0;
  for (int t = 1; t <= years; ++t) sum += 1.0 / std::pow(1.0 + gamma, t - 1);
  return sum;
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace gridsec::testing
