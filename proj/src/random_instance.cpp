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

#include "gridsec/random_instance.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace gridsec {
namespace {

constexpr NodeId kRoot = -1;

struct UnionFind {
  std::unordered_map<NodeId, NodeId> parent;
  NodeId find(NodeId v) {
    auto it = parent.find(v);
    if (it == parent.end()) return parent[v] = v;
    if (it->second == v) return v;
    return it->second = find(it->second);
  }
  bool unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

NodeId contract(const PlanningInstance& instance, NodeId v) {
  return instance.is_substation(v) ? kRoot : v;
}

// Orients a spanning tree of the contracted graph, given as edge indices.
Plan orient(const PlanningInstance& instance, const std::vector<std::size_t>& tree) {
  std::unordered_map<NodeId, std::vector<std::size_t>> adj;
  for (std::size_t k : tree) {
    const auto& e = instance.edges()[k];
    adj[contract(instance, e.a)].push_back(k);
    adj[contract(instance, e.b)].push_back(k);
  }
  std::vector<Arc> arcs;
  std::set<NodeId> seen{kRoot};
  std::vector<NodeId> stack{kRoot};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (std::size_t k : adj[v]) {
      const auto& e = instance.edges()[k];
      const bool a_side = contract(instance, e.a) == v;
      const NodeId child = a_side ? e.b : e.a;
      if (!seen.insert(contract(instance, child)).second) continue;
      arcs.push_back({a_side ? e.a : e.b, child});
      stack.push_back(contract(instance, child));
    }
  }
  return Plan(std::move(arcs));
}

std::vector<std::size_t> kruskal(const PlanningInstance& instance,
                                 const std::vector<std::size_t>& order) {
  UnionFind uf;
  std::vector<std::size_t> tree;
  for (std::size_t k : order) {
    const auto& e = instance.edges()[k];
    if (uf.unite(contract(instance, e.a), contract(instance, e.b))) tree.push_back(k);
  }
  return tree;
}

}  // namespace

PlanningInstance random_instance(const RandomInstanceOptions& options, std::mt19937_64& rng) {
  if (options.substations == 0) throw std::invalid_argument("need at least one substation");
  const auto n = static_cast<NodeId>(options.consumers);
  const auto s = static_cast<NodeId>(options.substations);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](NodeId lo, NodeId hi) {
    return std::uniform_int_distribution<NodeId>(lo, hi)(rng);
  };

  LineParams line{0.3655, 0.2520};
  const double m = line.rx_ratio();
  EconParams econ{5000.0, 450.0, 0.1, 10};
  SecurityParams sec{15.0, 14.25, 15.75, 1.0, 1.0};

  std::vector<Node> nodes;
  for (NodeId i = 1; i <= n; ++i) {
    Node node;
    node.id = i;
    node.p_demand_kw = 20.0 + 180.0 * unit(rng);
    node.q_demand_kvar = 10.0 + 90.0 * unit(rng);
    const double fraction = 0.5 * unit(rng);
    node.p_gen_kw = fraction * node.p_demand_kw;
    node.q_gen_kvar = fraction * node.q_demand_kvar;
    if (options.random_gains) node.gain = 0.2 + 4.8 * unit(rng);
    nodes.push_back(node);
  }
  for (NodeId k = 1; k <= s; ++k) {
    Node sub;
    sub.id = n + k;
    sub.kind = NodeKind::Substation;
    nodes.push_back(sub);
  }

  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<CandidateEdge> edges;
  auto add_edge = [&](NodeId a, NodeId b) {
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) return false;
    used.insert({std::min(a, b), std::max(a, b)});
    CandidateEdge e;
    e.a = a;
    e.b = b;
    e.length_km = static_cast<double>(pick(1, 9));
    if (options.random_impedance) {
      e.x_ohm_per_km = 0.1 + 0.4 * unit(rng);
      e.r_ohm_per_km = m * e.x_ohm_per_km;
    }
    edges.push_back(e);
    return true;
  };
  // Random tree: each consumer attaches to an earlier consumer or a substation.
  for (NodeId i = 1; i <= n; ++i) {
    const NodeId choice = pick(0, i - 1);
    add_edge(choice == 0 ? n + pick(1, s) : choice, i);
  }
  const std::size_t max_extra = static_cast<std::size_t>(n) * (n - 1) / 2 + n * s;
  for (std::size_t added = 0, tries = 0; added < options.extra_edges && tries < 50 * max_extra;
       ++tries) {
    const NodeId a = pick(1, n);
    const NodeId b = pick(1, n + s);
    if (add_edge(a, b)) ++added;
  }

  PlanningInstance draft(nodes, edges, line, econ, sec, 1e6);
  const double floor_x = min_max_path_reactance(draft);
  const double mst_x = max_path_reactance(draft, minimum_length_plan(draft));
  double threshold = 0.0;
  switch (options.regime) {
    case SecurityRegime::Slack:
      threshold = 10.0 * mst_x;
      break;
    case SecurityRegime::Binding:
      threshold = floor_x + (0.02 + 0.98 * unit(rng)) * (mst_x - floor_x);
      if (mst_x - floor_x < 1e-9 * mst_x) threshold = mst_x * (1.0 + 1e-6);
      break;
    case SecurityRegime::Infeasible:
      threshold = floor_x * (0.5 + 0.45 * unit(rng));
      break;
  }
  sec.attack_budget_c0 = sec.planning_bound() / (2.0 * std::max(threshold, 1e-12));
  return PlanningInstance(std::move(nodes), std::move(edges), line, econ, sec, 1e6);
}

Plan random_radial_plan(const PlanningInstance& instance, std::mt19937_64& rng) {
  std::vector<std::size_t> order(instance.edges().size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  return orient(instance, kruskal(instance, order));
}

Plan minimum_length_plan(const PlanningInstance& instance) {
  std::vector<std::size_t> order(instance.edges().size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return instance.edges()[l].length_km < instance.edges()[r].length_km;
  });
  return orient(instance, kruskal(instance, order));
}

double min_max_path_reactance(const PlanningInstance& instance) {
  std::unordered_map<NodeId, std::vector<std::pair<NodeId, double>>> adj;
  for (const auto& e : instance.edges()) {
    const NodeId a = contract(instance, e.a), b = contract(instance, e.b);
    if (a == b) continue;
    adj[a].push_back({b, e.reactance_ohm()});
    adj[b].push_back({a, e.reactance_ohm()});
  }
  std::unordered_map<NodeId, double> dist{{kRoot, 0.0}};
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, kRoot});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (const auto& [w, x] : adj[v]) {
      auto it = dist.find(w);
      if (it == dist.end() || d + x < it->second) {
        dist[w] = d + x;
        heap.push({d + x, w});
      }
    }
  }
  double worst = 0.0;
  for (NodeId c : instance.consumers()) {
    auto it = dist.find(c);
    worst = std::max(worst, it == dist.end() ? std::numeric_limits<double>::infinity() : it->second);
  }
  return worst;
}

double max_path_reactance(const PlanningInstance& instance, const Plan& plan) {
  const RadialForest forest(instance, plan);
  double worst = 0.0;
  for (NodeId c : instance.consumers()) worst = std::max(worst, forest.path_reactance(c));
  return worst;
}

}  // namespace gridsec
