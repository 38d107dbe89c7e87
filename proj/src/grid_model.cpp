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

#include "gridsec/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace gridsec {
namespace {

std::uint64_t pair_key(NodeId a, NodeId b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

std::string edge_label(const CandidateEdge& e) {
  return std::to_string(e.a) + "-" + std::to_string(e.b);
}

std::string arc_label(const Arc& a) {
  return std::to_string(a.from) + "->" + std::to_string(a.to);
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g;", v);
  out += buf;
}

}  // namespace

double SecurityParams::u_rated() const {
  const double v0 = v_rated_kv * 1e3;
  return v0 * v0;
}

double SecurityParams::y_bar() const {
  const double v = v_max_kv * 1e3;
  return std::abs(v * v - u_rated());
}

double SecurityParams::y_bar_lower() const {
  const double v = v_min_kv * 1e3;
  return std::abs(v * v - u_rated());
}

double SecurityParams::planning_bound() const { return std::min(y_bar(), y_bar_lower()); }

PlanningInstance::PlanningInstance(std::vector<Node> nodes, std::vector<CandidateEdge> edges,
                                   LineParams line, EconParams econ, SecurityParams security,
                                   double big_m_kw,
                                   std::unordered_map<NodeId, SubstationLimits> substation_limits)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      line_(line),
      econ_(econ),
      security_(security),
      big_m_kw_(big_m_kw),
      substation_limits_(std::move(substation_limits)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw InstanceError("duplicate node id " + std::to_string(nodes_[i].id));
    }
    if (nodes_[i].is_substation()) ++substation_count_;
  }
  for (auto& e : edges_) {
    if (e.r_ohm_per_km == 0.0) e.r_ohm_per_km = line_.r_ohm_per_km;
    if (e.x_ohm_per_km == 0.0) e.x_ohm_per_km = line_.x_ohm_per_km;
  }
  validate();
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    pair_index_.emplace(pair_key(edges_[k].a, edges_[k].b), k);
  }
  rx_ratio_ = edges_.empty() ? line_.rx_ratio() : edges_.front().r_ohm_per_km / edges_.front().x_ohm_per_km;
  hash_ = compute_hash();
}

void PlanningInstance::validate() const {
  if (substation_count_ == 0) throw InstanceError("instance has no substation");
  for (const auto& n : nodes_) {
    const std::string where = "node " + std::to_string(n.id);
    if (n.id < 0) throw InstanceError(where + ": negative id");
    if (n.p_demand_kw < 0 || n.q_demand_kvar < 0 || n.p_gen_kw < 0 || n.q_gen_kvar < 0) {
      throw InstanceError(where + ": demand and generation must be nonnegative");
    }
    if (n.gain && !(*n.gain > 0)) throw InstanceError(where + ": integral gain must be positive");
    if (n.is_substation() &&
        (n.p_demand_kw != 0 || n.q_demand_kvar != 0 || n.p_gen_kw != 0 || n.q_gen_kvar != 0)) {
      throw InstanceError(where + ": substation carries demand or generation");
    }
  }
  if (line_.r_ohm_per_km <= 0 || line_.x_ohm_per_km <= 0) {
    throw InstanceError("line parameters must be positive");
  }
  std::set<std::uint64_t> seen;
  double ratio = 0.0;
  for (const auto& e : edges_) {
    const std::string where = "edge " + edge_label(e);
    if (e.a == e.b) throw InstanceError(where + ": self-loop");
    if (!index_.count(e.a) || !index_.count(e.b)) throw InstanceError(where + ": unknown endpoint");
    if (!(e.length_km > 0)) throw InstanceError(where + ": length must be positive");
    if (e.r_ohm_per_km <= 0 || e.x_ohm_per_km <= 0) {
      throw InstanceError(where + ": impedance must be positive");
    }
    if (!seen.insert(pair_key(e.a, e.b)).second) throw InstanceError(where + ": duplicate edge");
    const double m = e.r_ohm_per_km / e.x_ohm_per_km;
    if (ratio == 0.0) {
      ratio = m;
    } else if (std::abs(m - ratio) > 1e-9 * ratio) {
      throw InstanceError(where + ": non-uniform ratio r/x (" + std::to_string(m) + " vs " +
                          std::to_string(ratio) + ")");
    }
  }
  if (econ_.construction_cost_per_km < 0 || econ_.maintenance_cost_per_km_year < 0) {
    throw InstanceError("costs must be nonnegative");
  }
  if (econ_.interest_rate < 0) throw InstanceError("interest rate must be nonnegative");
  if (econ_.horizon_years < 1) throw InstanceError("horizon must be at least one year");
  const auto& s = security_;
  if (!(s.v_min_kv < s.v_rated_kv && s.v_rated_kv < s.v_max_kv)) {
    throw InstanceError("voltage band requires v_min < v_rated < v_max");
  }
  if (!(s.attack_budget_c0 > 0)) throw InstanceError("attack budget must be positive");
  if (!(s.gain_default > 0)) throw InstanceError("integral gain must be positive");
  if (!(big_m_kw_ > 0)) throw InstanceError("big-M must be positive");
  for (const auto& [id, lim] : substation_limits_) {
    if (!index_.count(id) || !nodes_[index_.at(id)].is_substation()) {
      throw InstanceError("supply limits given for non-substation " + std::to_string(id));
    }
  }

  // Every consumer must be reachable from a substation over candidate edges.
  std::unordered_map<NodeId, std::vector<NodeId>> adj;
  for (const auto& e : edges_) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::set<NodeId> reached;
  std::deque<NodeId> queue;
  for (const auto& n : nodes_) {
    if (n.is_substation()) {
      reached.insert(n.id);
      queue.push_back(n.id);
    }
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    for (NodeId w : adj[v]) {
      if (reached.insert(w).second) queue.push_back(w);
    }
  }
  for (const auto& n : nodes_) {
    if (!reached.count(n.id)) {
      throw InstanceError("node " + std::to_string(n.id) + ": unreachable consumer");
    }
  }
}

std::string PlanningInstance::compute_hash() const {
  std::string text;
  std::vector<Node> nodes = nodes_;
  std::sort(nodes.begin(), nodes.end(), [](const Node& l, const Node& r) { return l.id < r.id; });
  for (const auto& n : nodes) {
    text += std::to_string(n.id) + (n.is_substation() ? "S;" : "C;");
    append_number(text, n.p_demand_kw);
    append_number(text, n.q_demand_kvar);
    append_number(text, n.p_gen_kw);
    append_number(text, n.q_gen_kvar);
    append_number(text, n.gain.value_or(0.0));
  }
  std::vector<CandidateEdge> edges = edges_;
  for (auto& e : edges) {
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges.begin(), edges.end(), [](const CandidateEdge& l, const CandidateEdge& r) {
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
  });
  for (const auto& e : edges) {
    text += edge_label(e) + ";";
    append_number(text, e.length_km);
    append_number(text, e.r_ohm_per_km);
    append_number(text, e.x_ohm_per_km);
  }
  for (double v : {econ_.construction_cost_per_km, econ_.maintenance_cost_per_km_year,
                   econ_.interest_rate, static_cast<double>(econ_.horizon_years),
                   security_.v_rated_kv, security_.v_min_kv, security_.v_max_kv,
                   security_.attack_budget_c0, security_.gain_default, big_m_kw_}) {
    append_number(text, v);
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

const Node& PlanningInstance::node(NodeId id) const { return nodes_[node_index(id)]; }

std::size_t PlanningInstance::node_index(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InstanceError("unknown node " + std::to_string(id));
  return it->second;
}

std::optional<std::size_t> PlanningInstance::edge_between(NodeId a, NodeId b) const {
  auto it = pair_index_.find(pair_key(a, b));
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

const CandidateEdge& PlanningInstance::edge_of(const Arc& arc) const {
  auto k = edge_between(arc.from, arc.to);
  if (!k) throw InstanceError("arc " + arc_label(arc) + " is not a candidate edge");
  return edges_[*k];
}

std::vector<NodeId> PlanningInstance::substations() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.is_substation()) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> PlanningInstance::consumers() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (!n.is_substation()) out.push_back(n.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SubstationLimits PlanningInstance::limits_of(NodeId substation) const {
  auto it = substation_limits_.find(substation);
  return it == substation_limits_.end() ? SubstationLimits{} : it->second;
}

double PlanningInstance::gain_of(NodeId consumer) const {
  const auto& n = node(consumer);
  return n.gain.value_or(security_.gain_default);
}

Plan::Plan(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
  std::sort(arcs_.begin(), arcs_.end());
  arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
}

bool Plan::contains(const Arc& arc) const {
  return std::binary_search(arcs_.begin(), arcs_.end(), arc);
}

std::string to_string(RadialityRule rule) {
  switch (rule) {
    case RadialityRule::OneWay: return "one-way";
    case RadialityRule::UnknownEdge: return "unknown-edge";
    case RadialityRule::EdgeCount: return "edge-count";
    case RadialityRule::SubstationInflow: return "substation-inflow";
    case RadialityRule::InDegree: return "in-degree";
    case RadialityRule::Cycle: return "cycle";
  }
  return "unknown";
}

std::optional<RadialityViolation> validate_radiality(const PlanningInstance& instance,
                                                     const Plan& plan) {
  for (const auto& arc : plan.arcs()) {
    if (!instance.has_node(arc.from) || !instance.has_node(arc.to) ||
        !instance.edge_between(arc.from, arc.to)) {
      return RadialityViolation{RadialityRule::UnknownEdge,
                                "arc " + arc_label(arc) + " is not a candidate edge", {arc}, {}};
    }
  }
  if (plan.size() != instance.radial_edge_count()) {
    return RadialityViolation{RadialityRule::EdgeCount,
                              "edge count " + std::to_string(plan.size()) + " != " +
                                  std::to_string(instance.radial_edge_count()),
                              {},
                              {}};
  }
  for (const auto& arc : plan.arcs()) {
    const Arc back{arc.to, arc.from};
    if (plan.contains(back)) {
      return RadialityViolation{RadialityRule::OneWay,
                                "both orientations of " + arc_label(arc) + " selected",
                                {arc, back},
                                {}};
    }
  }
  std::unordered_map<NodeId, std::vector<Arc>> incoming;
  for (const auto& arc : plan.arcs()) incoming[arc.to].push_back(arc);
  // Substation inflow is reported first: it usually leaves a consumer unfed too.
  for (NodeId sub : instance.substations()) {
    const auto it = incoming.find(sub);
    if (it != incoming.end()) {
      return RadialityViolation{RadialityRule::SubstationInflow,
                                "substation " + std::to_string(sub) + " has an incoming arc",
                                it->second, sub};
    }
  }
  for (const auto& n : instance.nodes()) {
    if (n.is_substation()) continue;
    const auto it = incoming.find(n.id);
    const std::size_t deg = it == incoming.end() ? 0 : it->second.size();
    if (deg != 1) {
      return RadialityViolation{RadialityRule::InDegree,
                                "consumer " + std::to_string(n.id) + " has in-degree " +
                                    std::to_string(deg),
                                deg ? it->second : std::vector<Arc>{}, n.id};
    }
  }
  // In-degree is now exactly one per consumer; walk parents to find loops.
  std::unordered_map<NodeId, int> state;  // 0 unseen, 1 on stack, 2 rooted
  for (const auto& n : instance.nodes()) {
    if (n.is_substation()) state[n.id] = 2;
  }
  for (NodeId start : instance.consumers()) {
    std::vector<NodeId> trail;
    NodeId v = start;
    while (state[v] == 0) {
      state[v] = 1;
      trail.push_back(v);
      v = incoming[v].front().from;
    }
    if (state[v] == 1) {
      std::vector<Arc> cycle;
      auto pos = std::find(trail.begin(), trail.end(), v);
      for (auto it = pos; it != trail.end(); ++it) cycle.push_back(incoming[*it].front());
      std::reverse(cycle.begin(), cycle.end());
      return RadialityViolation{RadialityRule::Cycle,
                                "cycle through consumer " + std::to_string(v) +
                                    " not connected to any substation",
                                cycle, v};
    }
    for (NodeId t : trail) state[t] = 2;
  }
  return std::nullopt;
}

RadialForest::RadialForest(const PlanningInstance& instance, const Plan& plan)
    : instance_(&instance) {
  if (auto violation = validate_radiality(instance, plan)) {
    throw InstanceError("plan is not radial: " + violation->message);
  }
  for (const auto& arc : plan.arcs()) {
    parent_.emplace(arc.to, arc);
    children_[arc.from].push_back(arc.to);
  }
  for (auto& [node, kids] : children_) std::sort(kids.begin(), kids.end());
  std::deque<NodeId> queue;
  for (NodeId s : instance.substations()) {
    root_[s] = s;
    path_reactance_[s] = 0.0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    order_.push_back(v);
    for (NodeId w : children(v)) {
      root_[w] = root_[v];
      path_reactance_[w] = path_reactance_[v] + instance.edge_of(parent_.at(w)).reactance_ohm();
      queue.push_back(w);
    }
  }
}

const Arc& RadialForest::parent_arc(NodeId consumer) const {
  auto it = parent_.find(consumer);
  if (it == parent_.end()) throw InstanceError("node " + std::to_string(consumer) + " has no parent");
  return it->second;
}

NodeId RadialForest::root_of(NodeId node) const {
  auto it = root_.find(node);
  if (it == root_.end()) throw InstanceError("node " + std::to_string(node) + " unreachable");
  return it->second;
}

std::vector<Arc> RadialForest::path(NodeId node) const {
  root_of(node);
  std::vector<Arc> out;
  for (auto it = parent_.find(node); it != parent_.end(); it = parent_.find(it->second.from)) {
    out.push_back(it->second);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double RadialForest::path_reactance(NodeId node) const {
  auto it = path_reactance_.find(node);
  if (it == path_reactance_.end()) throw InstanceError("node " + std::to_string(node) + " unreachable");
  return it->second;
}

const std::vector<NodeId>& RadialForest::children(NodeId node) const {
  static const std::vector<NodeId> none;
  auto it = children_.find(node);
  return it == children_.end() ? none : it->second;
}

std::vector<NodeId> RadialForest::subtree_consumers(NodeId substation) const {
  std::vector<NodeId> out;
  for (NodeId v : order_) {
    if (v != substation && !instance_->is_substation(v) && root_.at(v) == substation) out.push_back(v);
  }
  return out;
}

std::vector<Arc> path_to_substation(const PlanningInstance& instance, const Plan& plan,
                                    NodeId node) {
  if (!instance.has_node(node)) throw InstanceError("unknown node " + std::to_string(node));
  if (instance.is_substation(node)) return {};
  return RadialForest(instance, plan).path(node);
}

double present_value_factor(double gamma, int years) {
  double sum = 0.0;
  double term = 1.0;
  for (int t = 1; t <= years; ++t) {
    sum += term;
    term /= 1.0 + gamma;
  }
  return sum;
}

double selected_length_km(const PlanningInstance& instance, const Plan& plan) {
  double total = 0.0;
  for (const auto& arc : plan.arcs()) total += instance.edge_of(arc).length_km;
  return total;
}

PlanCost plan_cost(const PlanningInstance& instance, const Plan& plan) {
  if (auto violation = validate_radiality(instance, plan)) {
    throw InstanceError("invalid plan: " + violation->message);
  }
  const double length = selected_length_km(instance, plan);
  const auto& econ = instance.econ();
  PlanCost cost;
  cost.construction = econ.construction_cost_per_km * length;
  cost.maintenance = present_value_factor(econ.interest_rate, econ.horizon_years) *
                     econ.maintenance_cost_per_km_year * length;
  cost.total = cost.construction + cost.maintenance;
  return cost;
}

}  // namespace gridsec
