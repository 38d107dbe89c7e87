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

#include "gridsec/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridsec {
namespace {

using json = nlohmann::json;

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw InstanceError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceError(where + ": missing key '" + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number()) throw InstanceError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw InstanceError(where + "." + key + ": expected a number");
  return it->get<double>();
}

NodeId node_id(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw InstanceError(where + ": node id must be an integer");
  return v.get<NodeId>();
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InstanceError("cannot write " + path.string());
  out << text;
  if (!out) throw InstanceError("write failed for " + path.string());
}

PlanningInstance parse_instance(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("schema violation: ") + e.what());
  }
  const json& params = member(doc, "params", "instance");
  const json& line_j = member(params, "line", "params");
  const json& econ_j = member(params, "econ", "params");
  const json& sec_j = member(params, "security", "params");

  LineParams line{number(line_j, "r_ohm_per_km", "params.line"),
                  number(line_j, "x_ohm_per_km", "params.line")};

  EconParams econ;
  econ.construction_cost_per_km = number(econ_j, "construction_cost_per_km", "params.econ");
  econ.maintenance_cost_per_km_year = number(econ_j, "maintenance_cost_per_km_year", "params.econ");
  econ.interest_rate = number(econ_j, "interest_rate", "params.econ");
  const json& horizon = member(econ_j, "horizon_years", "params.econ");
  if (!horizon.is_number_integer()) throw InstanceError("params.econ.horizon_years: expected an integer");
  econ.horizon_years = horizon.get<int>();

  SecurityParams sec;
  sec.v_rated_kv = number(sec_j, "v_rated_kv", "params.security");
  sec.v_max_kv = number(sec_j, "v_max_kv", "params.security");
  // Without an explicit lower limit the band is mirrored in squared voltage.
  const double mirrored = 2.0 * sec.v_rated_kv * sec.v_rated_kv - sec.v_max_kv * sec.v_max_kv;
  sec.v_min_kv = optional_number(sec_j, "v_min_kv", "params.security")
                     .value_or(mirrored > 0 ? std::sqrt(mirrored) : 0.0);
  sec.attack_budget_c0 = number(sec_j, "attack_budget_c0", "params.security");
  sec.gain_default = optional_number(sec_j, "gain_default", "params.security").value_or(1.0);

  const double big_m = number(params, "big_m_kw", "params");
  const double default_fraction =
      optional_number(params, "gen_fraction_default", "params").value_or(0.0);

  std::vector<Node> nodes;
  const json& nodes_j = member(doc, "nodes", "instance");
  if (!nodes_j.is_array()) throw InstanceError("nodes: expected an array");
  for (std::size_t k = 0; k < nodes_j.size(); ++k) {
    const json& n = nodes_j[k];
    std::string where = "nodes[" + std::to_string(k) + "]";
    Node node;
    node.id = node_id(member(n, "id", where), where + ".id");
    where = "node " + std::to_string(node.id);
    const json& kind = member(n, "kind", where);
    if (kind == "substation") {
      node.kind = NodeKind::Substation;
    } else if (kind == "consumer") {
      node.kind = NodeKind::Consumer;
    } else {
      throw InstanceError(where + ".kind: expected \"substation\" or \"consumer\"");
    }
    node.p_demand_kw = optional_number(n, "p_demand_kw", where).value_or(0.0);
    node.q_demand_kvar = optional_number(n, "q_demand_kvar", where).value_or(0.0);
    if (node.kind == NodeKind::Consumer) {
      const double fraction = optional_number(n, "gen_fraction", where).value_or(default_fraction);
      node.p_gen_kw = optional_number(n, "p_gen_kw", where).value_or(fraction * node.p_demand_kw);
      node.q_gen_kvar = optional_number(n, "q_gen_kvar", where).value_or(fraction * node.q_demand_kvar);
    }
    node.gain = optional_number(n, "gain", where);
    nodes.push_back(node);
  }

  std::vector<CandidateEdge> edges;
  const json& edges_j = member(doc, "edges", "instance");
  if (!edges_j.is_array()) throw InstanceError("edges: expected an array");
  for (std::size_t k = 0; k < edges_j.size(); ++k) {
    const json& e = edges_j[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    CandidateEdge edge;
    edge.a = node_id(member(e, "a", where), where + ".a");
    edge.b = node_id(member(e, "b", where), where + ".b");
    edge.length_km = number(e, "length_km", where);
    edge.r_ohm_per_km = optional_number(e, "r_ohm_per_km", where).value_or(line.r_ohm_per_km);
    edge.x_ohm_per_km = optional_number(e, "x_ohm_per_km", where).value_or(line.x_ohm_per_km);
    edges.push_back(edge);
  }

  std::unordered_map<NodeId, SubstationLimits> limits;
  if (auto it = params.find("substation_limits"); it != params.end()) {
    if (!it->is_array()) throw InstanceError("params.substation_limits: expected an array");
    for (const json& s : *it) {
      const NodeId id = node_id(member(s, "id", "substation_limits"), "substation_limits.id");
      const std::string where = "substation_limits[" + std::to_string(id) + "]";
      limits[id] = SubstationLimits{optional_number(s, "p_min_kw", where),
                                    optional_number(s, "p_max_kw", where),
                                    optional_number(s, "q_min_kvar", where),
                                    optional_number(s, "q_max_kvar", where)};
    }
  }

  return PlanningInstance(std::move(nodes), std::move(edges), line, econ, sec, big_m,
                          std::move(limits));
}

PlanningInstance load_instance(const std::filesystem::path& path) {
  return parse_instance(read_text_file(path));
}

PlanFile parse_plan(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InstanceError(std::string("plan schema violation: ") + e.what());
  }
  PlanFile out;
  const json& hash = member(doc, "instance_hash", "plan");
  if (!hash.is_string()) throw InstanceError("plan.instance_hash: expected a string");
  out.instance_hash = hash.get<std::string>();
  const json& selected = member(doc, "selected", "plan");
  if (!selected.is_array()) throw InstanceError("plan.selected: expected an array");
  std::vector<Arc> arcs;
  for (std::size_t k = 0; k < selected.size(); ++k) {
    const json& pair = selected[k];
    const std::string where = "plan.selected[" + std::to_string(k) + "]";
    if (!pair.is_array() || pair.size() != 2) throw InstanceError(where + ": expected [from, to]");
    arcs.push_back(Arc{node_id(pair[0], where), node_id(pair[1], where)});
  }
  out.plan = Plan(std::move(arcs));
  return out;
}

PlanFile load_plan(const std::filesystem::path& path) { return parse_plan(read_text_file(path)); }

std::string plan_to_json(const PlanningInstance& instance, const Plan& plan) {
  std::ostringstream out;
  out << "{\n  \"instance_hash\": \"" << instance.hash() << "\",\n  \"selected\": [";
  for (std::size_t k = 0; k < plan.arcs().size(); ++k) {
    const Arc& a = plan.arcs()[k];
    out << (k ? ", " : "") << "[" << a.from << ", " << a.to << "]";
  }
  out << "]\n}\n";
  return out.str();
}

void save_plan(const std::filesystem::path& path, const PlanningInstance& instance,
               const Plan& plan) {
  write_text_file(path, plan_to_json(instance, plan));
}

std::string instance_to_json(const PlanningInstance& instance) {
  json doc;
  const auto& sec = instance.security();
  doc["params"] = {
      {"line", {{"r_ohm_per_km", instance.line().r_ohm_per_km},
                {"x_ohm_per_km", instance.line().x_ohm_per_km}}},
      {"econ", {{"construction_cost_per_km", instance.econ().construction_cost_per_km},
                {"maintenance_cost_per_km_year", instance.econ().maintenance_cost_per_km_year},
                {"interest_rate", instance.econ().interest_rate},
                {"horizon_years", instance.econ().horizon_years}}},
      {"security", {{"v_rated_kv", sec.v_rated_kv},
                    {"v_min_kv", sec.v_min_kv},
                    {"v_max_kv", sec.v_max_kv},
                    {"attack_budget_c0", sec.attack_budget_c0},
                    {"gain_default", sec.gain_default}}},
      {"big_m_kw", instance.big_m_kw()}};
  json nodes = json::array();
  for (const auto& n : instance.nodes()) {
    json j = {{"id", n.id},
              {"kind", n.is_substation() ? "substation" : "consumer"},
              {"p_demand_kw", n.p_demand_kw},
              {"q_demand_kvar", n.q_demand_kvar}};
    if (!n.is_substation()) {
      j["p_gen_kw"] = n.p_gen_kw;
      j["q_gen_kvar"] = n.q_gen_kvar;
    }
    if (n.gain) j["gain"] = *n.gain;
    nodes.push_back(j);
  }
  doc["nodes"] = nodes;
  json edges = json::array();
  for (const auto& e : instance.edges()) {
    edges.push_back({{"a", e.a}, {"b", e.b}, {"length_km", e.length_km},
                     {"r_ohm_per_km", e.r_ohm_per_km}, {"x_ohm_per_km", e.x_ohm_per_km}});
  }
  doc["edges"] = edges;
  return doc.dump(1) + "\n";
}

}  // namespace gridsec
