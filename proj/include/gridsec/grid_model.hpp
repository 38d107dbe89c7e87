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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridsec {

using NodeId = std::int32_t;

enum class NodeKind { Substation, Consumer };

struct Node {
  NodeId id = 0;
  NodeKind kind = NodeKind::Consumer;
  double p_demand_kw = 0.0;
  double q_demand_kvar = 0.0;
  double p_gen_kw = 0.0;
  double q_gen_kvar = 0.0;
  std::optional<double> gain;  // integral coefficient override

  bool is_substation() const { return kind == NodeKind::Substation; }
  double net_p_kw() const { return p_demand_kw - p_gen_kw; }
  double net_q_kvar() const { return q_demand_kvar - q_gen_kvar; }
};

/// Undirected candidate line. Per-km impedances left at zero inherit the
/// instance line parameters.
struct CandidateEdge {
  NodeId a = 0;
  NodeId b = 0;
  double length_km = 0.0;
  double r_ohm_per_km = 0.0;
  double x_ohm_per_km = 0.0;

  double resistance_ohm() const { return r_ohm_per_km * length_km; }
  double reactance_ohm() const { return x_ohm_per_km * length_km; }
};

struct LineParams {
  double r_ohm_per_km = 0.0;
  double x_ohm_per_km = 0.0;

  double rx_ratio() const { return r_ohm_per_km / x_ohm_per_km; }
};

struct EconParams {
  double construction_cost_per_km = 0.0;       // US$/km
  double maintenance_cost_per_km_year = 0.0;   // US$/km/year
  double interest_rate = 0.0;
  int horizon_years = 1;
};

struct SecurityParams {
  double v_rated_kv = 0.0;
  double v_min_kv = 0.0;
  double v_max_kv = 0.0;
  double attack_budget_c0 = 0.0;  // surrogate bound, W-scale
  double gain_default = 1.0;      // integral coefficient K_i

  double u_rated() const;  // V^2
  /// Overvoltage band |v_max^2 - v0^2| in V^2. Used by every assessment.
  double y_bar() const;
  /// Undervoltage band |v_min^2 - v0^2| in V^2.
  double y_bar_lower() const;
  /// Symmetric bound that keeps both voltage limits; the planner enforces this.
  double planning_bound() const;
};

/// Optional supply limits per substation, kW / kVAr.
struct SubstationLimits {
  std::optional<double> p_min, p_max, q_min, q_max;
};

/// An oriented arc (from -> to), reference direction away from the substation.
struct Arc {
  NodeId from = 0;
  NodeId to = 0;

  auto operator<=>(const Arc&) const = default;
};

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PlanningInstance {
 public:
  PlanningInstance(std::vector<Node> nodes, std::vector<CandidateEdge> edges,
                   LineParams line, EconParams econ, SecurityParams security,
                   double big_m_kw,
                   std::unordered_map<NodeId, SubstationLimits> substation_limits = {});

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<CandidateEdge>& edges() const { return edges_; }
  const LineParams& line() const { return line_; }
  const EconParams& econ() const { return econ_; }
  const SecurityParams& security() const { return security_; }
  double big_m_kw() const { return big_m_kw_; }
  double rx_ratio() const { return rx_ratio_; }

  const Node& node(NodeId id) const;
  std::size_t node_index(NodeId id) const;
  bool has_node(NodeId id) const { return index_.count(id) != 0; }
  bool is_substation(NodeId id) const { return node(id).is_substation(); }

  /// Index into edges() of the candidate joining a and b, in either order.
  std::optional<std::size_t> edge_between(NodeId a, NodeId b) const;
  const CandidateEdge& edge_of(const Arc& arc) const;

  std::vector<NodeId> substations() const;
  std::vector<NodeId> consumers() const;
  std::size_t substation_count() const { return substation_count_; }
  std::size_t consumer_count() const { return nodes_.size() - substation_count_; }
  /// Number of arcs in any radial plan, N_b - N_bS.
  std::size_t radial_edge_count() const { return consumer_count(); }

  SubstationLimits limits_of(NodeId substation) const;
  /// K_i for a consumer: node override or the instance default.
  double gain_of(NodeId consumer) const;

  /// Stable content hash (hex) used to bind plan files to instances.
  const std::string& hash() const { return hash_; }

 private:
  void validate() const;
  std::string compute_hash() const;

  std::vector<Node> nodes_;
  std::vector<CandidateEdge> edges_;
  LineParams line_;
  EconParams econ_;
  SecurityParams security_;
  double big_m_kw_ = 0.0;
  double rx_ratio_ = 0.0;
  std::unordered_map<NodeId, SubstationLimits> substation_limits_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::unordered_map<std::uint64_t, std::size_t> pair_index_;
  std::size_t substation_count_ = 0;
  std::string hash_;
};

/// Oriented edge selection. Arcs are kept sorted and unique.
class Plan {
 public:
  Plan() = default;
  explicit Plan(std::vector<Arc> arcs);

  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  bool contains(const Arc& arc) const;

  bool operator==(const Plan&) const = default;

 private:
  std::vector<Arc> arcs_;
};

enum class RadialityRule {
  OneWay,          // both orientations of a pair selected
  UnknownEdge,     // arc is not a candidate edge
  EdgeCount,       // |selected| != N_b - N_bS
  SubstationInflow,
  InDegree,        // consumer with zero or several incoming arcs
  Cycle,
};

struct RadialityViolation {
  RadialityRule rule;
  std::string message;
  std::vector<Arc> witness;
  std::optional<NodeId> node;
};

/// First violation found, or nullopt when the plan is a forest of
/// substation-rooted trees covering every consumer.
std::optional<RadialityViolation> validate_radiality(const PlanningInstance& instance,
                                                     const Plan& plan);

/// Tree view of a valid plan. Throws InstanceError when the plan is not radial.
class RadialForest {
 public:
  RadialForest(const PlanningInstance& instance, const Plan& plan);

  /// Incoming arc of a consumer.
  const Arc& parent_arc(NodeId consumer) const;
  NodeId root_of(NodeId node) const;
  /// Root-to-leaf arcs ending at `node`; empty for substations.
  std::vector<Arc> path(NodeId node) const;
  /// Sum of line reactances along path(node), ohm.
  double path_reactance(NodeId node) const;
  const std::vector<NodeId>& children(NodeId node) const;
  /// Nodes in breadth-first order from the substations, roots first.
  const std::vector<NodeId>& topological_order() const { return order_; }
  /// Consumers fed by `substation`, in topological order.
  std::vector<NodeId> subtree_consumers(NodeId substation) const;

 private:
  const PlanningInstance* instance_;
  std::unordered_map<NodeId, Arc> parent_;
  std::unordered_map<NodeId, NodeId> root_;
  std::unordered_map<NodeId, double> path_reactance_;
  std::unordered_map<NodeId, std::vector<NodeId>> children_;
  std::vector<NodeId> order_;
};

/// Arcs from the feeding substation down to `node`; empty for a substation.
std::vector<Arc> path_to_substation(const PlanningInstance& instance, const Plan& plan,
                                    NodeId node);

/// Discounting multiplier: sum_{t=1}^{T} (1+gamma)^{-(t-1)}.
double present_value_factor(double gamma, int years);

struct PlanCost {
  double construction = 0.0;
  double maintenance = 0.0;
  double total = 0.0;
};

/// Construction plus discounted maintenance cost, US$. Throws on invalid plans.
PlanCost plan_cost(const PlanningInstance& instance, const Plan& plan);

/// Total selected length in km, summed in canonical arc order.
double selected_length_km(const PlanningInstance& instance, const Plan& plan);

std::string to_string(RadialityRule rule);

}  // namespace gridsec
