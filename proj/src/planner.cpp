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

#include "gridsec/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <unordered_map>

#include "gridsec/attack_analysis.hpp"
#include "gridsec/distflow.hpp"

namespace gridsec {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kLengthTol = 1e-9;

// Union-find with rollback (union by size, no path compression).
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t v) const {
    while (parent_[v] != v) v = parent_[v];
    return v;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    history_.push_back(b);
    return true;
  }
  void rollback() {
    const std::size_t b = history_.back();
    history_.pop_back();
    size_[parent_[b]] -= size_[b];
    parent_[b] = b;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> history_;
};

// Plain union-find for throwaway bound computations.
struct ScratchUnionFind {
  std::vector<std::size_t> parent;
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
};

struct SearchEdge {
  std::size_t id;    // index into instance.edges()
  std::size_t u, v;  // contracted endpoints, 0 = merged substations
  double length;
  double reactance;
};

// Optional per-substation supply bounds; unset upper bounds default to M per
// incident candidate line, as in the MILP.
bool supply_within_limits(const PlanningInstance& instance, const FlowSolution& flows) {
  for (NodeId sub : instance.substations()) {
    const SubstationLimits lim = instance.limits_of(sub);
    std::size_t incident = 0;
    for (const auto& e : instance.edges()) incident += (e.a == sub || e.b == sub) ? 1 : 0;
    const double cap = instance.big_m_kw() * static_cast<double>(incident);
    const auto p_it = flows.p_sub_kw.find(sub);
    const auto q_it = flows.q_sub_kvar.find(sub);
    const double p = p_it == flows.p_sub_kw.end() ? 0.0 : p_it->second;
    const double q = q_it == flows.q_sub_kvar.end() ? 0.0 : q_it->second;
    if (p < lim.p_min.value_or(0.0) || p > lim.p_max.value_or(cap)) return false;
    if (q < lim.q_min.value_or(0.0) || q > lim.q_max.value_or(cap)) return false;
  }
  return true;
}

bool has_supply_limits(const PlanningInstance& instance) {
  for (NodeId sub : instance.substations()) {
    const SubstationLimits lim = instance.limits_of(sub);
    if (lim.p_min || lim.p_max || lim.q_min || lim.q_max) return true;
  }
  return false;
}

class BranchAndBound {
 public:
  BranchAndBound(const PlanningInstance& instance, const SolveOptions& options)
      : instance_(instance),
        options_(options),
        start_(Clock::now()),
        check_supply_(has_supply_limits(instance)) {
    const auto consumers = instance.consumers();
    index_.emplace(-1, 0);
    node_of_.push_back(-1);
    for (NodeId c : consumers) {
      index_.emplace(c, node_of_.size());
      node_of_.push_back(c);
    }
    for (std::size_t k = 0; k < instance.edges().size(); ++k) {
      const auto& e = instance.edges()[k];
      const std::size_t u = contracted(e.a), v = contracted(e.b);
      if (u == v) continue;  // substation to substation
      edges_.push_back({k, u, v, e.length_km, e.reactance_ohm()});
    }
    std::sort(edges_.begin(), edges_.end(), [](const SearchEdge& l, const SearchEdge& r) {
      if (l.length != r.length) return l.length < r.length;
      return l.id < r.id;
    });
    limit_ = options.security_enabled ? path_reactance_limit(instance, options.c0)
                                      : std::numeric_limits<double>::infinity();
    net_p_.assign(node_of_.size(), 0.0);
    net_q_.assign(node_of_.size(), 0.0);
    for (std::size_t k = 1; k < node_of_.size(); ++k) {
      net_p_[k] = instance.node(node_of_[k]).net_p_kw();
      net_q_[k] = instance.node(node_of_[k]).net_q_kvar();
    }
  }

  SolveResult run() {
    RollbackUnionFind uf(node_of_.size());
    timed_out_ = false;
    search(0, uf);
    SolveResult result;
    result.explored_nodes = explored_;
    result.wall_time_s = elapsed();
    if (best_) {
      result.plan = *best_;
      result.has_plan = true;
      result.objective = plan_cost(instance_, *best_).total;
    }
    result.status = timed_out_ ? SolveStatus::TimeLimit
                    : best_    ? SolveStatus::Optimal
                               : SolveStatus::Infeasible;
    return result;
  }

 private:
  std::size_t contracted(NodeId id) const {
    return instance_.is_substation(id) ? 0 : index_.at(id);
  }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  void search(std::size_t pos, RollbackUnionFind& uf) {
    if (timed_out_) return;
    ++explored_;
    if ((explored_ & 63) == 0 && elapsed() > options_.time_limit_s) {
      timed_out_ = true;
      return;
    }
    if (chosen_.size() + 1 == node_of_.size()) {
      evaluate_leaf();
      return;
    }
    const double completion = completion_bound(pos, uf);
    if (!std::isfinite(completion)) return;
    if (best_ && committed_length_ + completion >= best_length_ - kLengthTol) return;
    if (options_.security_enabled && !security_feasible(pos)) return;

    const SearchEdge& e = edges_[pos];
    if (uf.unite(e.u, e.v)) {
      chosen_.push_back(pos);
      committed_length_ += e.length;
      search(pos + 1, uf);
      committed_length_ -= e.length;
      chosen_.pop_back();
      uf.rollback();
    }
    search(pos + 1, uf);
  }

  // Kruskal over the undecided suffix; infinity when it cannot span.
  double completion_bound(std::size_t pos, const RollbackUnionFind& uf) const {
    ScratchUnionFind scratch{std::vector<std::size_t>(node_of_.size())};
    std::size_t components = 0;
    for (std::size_t v = 0; v < node_of_.size(); ++v) {
      scratch.parent[v] = uf.find(v);
      if (scratch.parent[v] == v) ++components;
    }
    double total = 0.0;
    for (std::size_t k = pos; k < edges_.size() && components > 1; ++k) {
      const std::size_t a = scratch.find(edges_[k].u), b = scratch.find(edges_[k].v);
      if (a == b) continue;
      scratch.parent[a] = b;
      total += edges_[k].length;
      --components;
    }
    return components == 1 ? total : std::numeric_limits<double>::infinity();
  }

  bool security_feasible(std::size_t pos) const {
    const std::size_t n = node_of_.size();
    std::vector<std::vector<std::pair<std::size_t, double>>> committed(n), available(n);
    for (std::size_t k : chosen_) {
      const auto& e = edges_[k];
      committed[e.u].push_back({e.v, e.reactance});
      committed[e.v].push_back({e.u, e.reactance});
      available[e.u].push_back({e.v, e.reactance});
      available[e.v].push_back({e.u, e.reactance});
    }
    for (std::size_t k = pos; k < edges_.size(); ++k) {
      const auto& e = edges_[k];
      available[e.u].push_back({e.v, e.reactance});
      available[e.v].push_back({e.u, e.reactance});
    }
    // Committed paths from the substations are final.
    std::vector<double> depth(n, -1.0);
    std::vector<std::size_t> stack{0};
    depth[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& [w, x] : committed[v]) {
        if (depth[w] >= 0.0) continue;
        depth[w] = depth[v] + x;
        if (depth[w] > limit_) return false;
        stack.push_back(w);
      }
    }
    // Any completion routes each consumer over available edges only.
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[0] = 0.0;
    heap.push({0.0, 0});
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      for (const auto& [w, x] : available[v]) {
        if (d + x < dist[w]) {
          dist[w] = d + x;
          heap.push({dist[w], w});
        }
      }
    }
    return std::all_of(dist.begin(), dist.end(), [&](double d) { return d <= limit_; });
  }

  void evaluate_leaf() {
    const std::size_t n = node_of_.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t k : chosen_) {
      adj[edges_[k].u].push_back(k);
      adj[edges_[k].v].push_back(k);
    }
    std::vector<std::size_t> parent_edge(n, edges_.size());
    std::vector<std::size_t> order{0};
    std::vector<double> depth(n, 0.0);
    std::vector<bool> seen(n, false);
    seen[0] = true;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const std::size_t v = order[head];
      for (std::size_t k : adj[v]) {
        const std::size_t w = edges_[k].u == v ? edges_[k].v : edges_[k].u;
        if (seen[w]) continue;
        seen[w] = true;
        parent_edge[w] = k;
        depth[w] = depth[v] + edges_[k].reactance;
        order.push_back(w);
      }
    }
    if (order.size() != n) return;
    if (options_.security_enabled &&
        std::any_of(depth.begin(), depth.end(), [&](double d) { return d > limit_; })) {
      return;
    }
    // Subtree net demand must respect 0 <= flow <= M.
    std::vector<double> p = net_p_, q = net_q_;
    const double big_m = instance_.big_m_kw();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t v = *it;
      if (v == 0) continue;
      if (p[v] < 0 || q[v] < 0 || p[v] > big_m || q[v] > big_m) return;
      const auto& e = edges_[parent_edge[v]];
      const std::size_t up = e.u == v ? e.v : e.u;
      p[up] += p[v];
      q[up] += q[v];
    }
    if (best_ && committed_length_ >= best_length_ - kLengthTol) return;

    std::vector<Arc> arcs;
    for (std::size_t v = 1; v < n; ++v) {
      const auto& inst_edge = instance_.edges()[edges_[parent_edge[v]].id];
      const NodeId child = node_of_[v];
      arcs.push_back({inst_edge.a == child ? inst_edge.b : inst_edge.a, child});
    }
    Plan plan(std::move(arcs));
    if (check_supply_ && !supply_within_limits(instance_, compute_flows(instance_, plan))) return;
    best_ = std::move(plan);
    best_length_ = committed_length_;
    if (options_.log) {
      *options_.log << "incumbent node=" << explored_ << " length_km=" << best_length_
                    << " time_s=" << elapsed() << '\n';
    }
  }

  const PlanningInstance& instance_;
  const SolveOptions& options_;
  Clock::time_point start_;
  bool check_supply_ = false;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<NodeId> node_of_;
  std::vector<SearchEdge> edges_;
  std::vector<double> net_p_, net_q_;
  double limit_ = 0.0;

  std::vector<std::size_t> chosen_;
  double committed_length_ = 0.0;
  std::optional<Plan> best_;
  double best_length_ = std::numeric_limits<double>::infinity();
  std::uint64_t explored_ = 0;
  bool timed_out_ = false;
};

// Full acceptance test shared by the oracle and the final re-validation.
bool plan_is_feasible(const PlanningInstance& instance, const Plan& plan,
                      const SolveOptions& options) {
  if (validate_radiality(instance, plan)) return false;
  FlowSolution flows;
  try {
    flows = compute_flows(instance, plan);
  } catch (const FlowError&) {
    return false;
  }
  const auto report = check_static_limits(instance, plan, flows, {});
  if (!report.ok() || !supply_within_limits(instance, flows)) return false;
  if (options.security_enabled &&
      !security_check(instance, plan, options.c0, instance.security().planning_bound()).secure) {
    return false;
  }
  return true;
}

}  // namespace

double path_reactance_limit(const PlanningInstance& instance, double c0) {
  return instance.security().planning_bound() / (2.0 * c0);
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::TimeLimit: return "time-limit";
  }
  return "unknown";
}

SolveResult solve_exact(const PlanningInstance& instance, const SolveOptions& options) {
  if (!(options.time_limit_s > 0)) throw std::invalid_argument("time limit must be positive");
  if (options.security_enabled && !(options.c0 > 0)) {
    throw std::invalid_argument("security planning needs a positive attack budget");
  }
  if (options.log) {
    *options.log << "solve security=" << (options.security_enabled ? 1 : 0) << " c0=" << options.c0
                 << " seed=" << options.deterministic_seed << " nodes=" << instance.nodes().size()
                 << " edges=" << instance.edges().size() << '\n';
  }
  BranchAndBound bnb(instance, options);
  SolveResult result = bnb.run();
  if (result.has_plan && !plan_is_feasible(instance, result.plan, options)) {
    throw std::logic_error("branch-and-bound incumbent failed re-validation");
  }
  if (options.log) {
    *options.log << "done status=" << to_string(result.status) << " explored=" << result.explored_nodes
                 << " objective=" << result.objective << " time_s=" << result.wall_time_s << '\n';
  }
  return result;
}

SolveResult enumerate_forests(const PlanningInstance& instance, const SolveOptions& options) {
  if (instance.nodes().size() > options.node_cap_for_oracle) {
    throw OracleCapError("instance has " + std::to_string(instance.nodes().size()) +
                         " nodes, exceeds oracle cap " + std::to_string(options.node_cap_for_oracle));
  }
  const auto start = Clock::now();
  const auto& edges = instance.edges();
  const std::size_t target = instance.radial_edge_count();
  SolveResult best;
  std::vector<Arc> chosen;

  // Each candidate edge is absent or used in one of its two orientations.
  std::function<void(std::size_t)> visit = [&](std::size_t k) {
    if (chosen.size() == target) {
      ++best.explored_nodes;
      Plan plan(chosen);
      if (!plan_is_feasible(instance, plan, options)) return;
      const double objective = plan_cost(instance, plan).total;
      if (!best.has_plan || objective < best.objective) {
        best.plan = std::move(plan);
        best.objective = objective;
        best.has_plan = true;
      }
      return;
    }
    if (k == edges.size() || edges.size() - k < target - chosen.size()) return;
    visit(k + 1);
    for (const Arc arc : {Arc{edges[k].a, edges[k].b}, Arc{edges[k].b, edges[k].a}}) {
      chosen.push_back(arc);
      visit(k + 1);
      chosen.pop_back();
    }
  };
  visit(0);
  best.status = best.has_plan ? SolveStatus::Optimal : SolveStatus::Infeasible;
  best.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return best;
}

}  // namespace gridsec
