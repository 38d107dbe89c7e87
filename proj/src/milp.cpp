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

#include "gridsec/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gridsec/distflow.hpp"

namespace gridsec {
namespace {

std::string arc_suffix(const Arc& a) { return std::to_string(a.from) + "_" + std::to_string(a.to); }

std::string n_name(const Arc& a) { return "n_" + arc_suffix(a); }
std::string p_name(const Arc& a) { return "p_" + arc_suffix(a); }
std::string q_name(const Arc& a) { return "q_" + arc_suffix(a); }
std::string x_name(NodeId i, const Arc& a) { return "x_" + std::to_string(i) + "_" + arc_suffix(a); }

std::vector<Arc> candidate_arcs(const PlanningInstance& instance) {
  std::vector<Arc> arcs;
  for (const auto& e : instance.edges()) {
    arcs.push_back({e.a, e.b});
    arcs.push_back({e.b, e.a});
  }
  return arcs;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

std::size_t MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  const std::size_t idx = variables_.size();
  if (!by_name_.emplace(name, idx).second) {
    throw std::invalid_argument("duplicate variable " + name);
  }
  variables_.push_back({std::move(name), kind, lower, upper});
  return idx;
}

void MilpModel::add_constraint(std::string name, std::vector<LinearTerm> terms, Sense sense,
                               double rhs) {
  constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
}

void MilpModel::add_objective_term(std::size_t var, double coef) { objective_.push_back({var, coef}); }

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(), [](const MilpVariable& v) {
    return v.kind == VarKind::Binary;
  }));
}

double MilpModel::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (const auto& t : objective_) total += t.coef * values.at(t.var);
  return total;
}

std::vector<std::string> MilpModel::violations(const std::vector<double>& values, double tol) const {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < variables_.size(); ++k) {
    const auto& v = variables_[k];
    const double x = values.at(k);
    const double scale = tol * std::max(1.0, std::abs(x));
    if (x < v.lower - scale || x > v.upper + scale) out.push_back("bound:" + v.name);
    if (v.kind == VarKind::Binary && std::abs(x - std::round(x)) > tol) out.push_back("integrality:" + v.name);
  }
  for (const auto& c : constraints_) {
    double lhs = 0.0;
    double magnitude = std::abs(c.rhs);
    for (const auto& t : c.terms) {
      lhs += t.coef * values.at(t.var);
      magnitude = std::max(magnitude, std::abs(t.coef * values.at(t.var)));
    }
    const double slack = tol * std::max(1.0, magnitude);
    const bool ok = c.sense == Sense::LessEqual      ? lhs <= c.rhs + slack
                    : c.sense == Sense::GreaterEqual ? lhs >= c.rhs - slack
                                                     : std::abs(lhs - c.rhs) <= slack;
    if (!ok) out.push_back(c.name);
  }
  return out;
}

MilpModel build_milp(const PlanningInstance& instance, const MilpOptions& options) {
  MilpModel model;
  const double big_m = instance.big_m_kw();
  const auto arcs = candidate_arcs(instance);
  const auto substations = instance.substations();
  const auto consumers = instance.consumers();
  const auto& econ = instance.econ();
  const double unit_cost = econ.construction_cost_per_km +
                           present_value_factor(econ.interest_rate, econ.horizon_years) *
                               econ.maintenance_cost_per_km_year;

  std::map<NodeId, std::vector<Arc>> out_arcs, in_arcs;
  for (const auto& a : arcs) {
    out_arcs[a.from].push_back(a);
    in_arcs[a.to].push_back(a);
  }

  for (const auto& a : arcs) {
    const auto n = model.add_variable(n_name(a), VarKind::Binary, 0.0, 1.0);
    model.add_objective_term(n, unit_cost * instance.edge_of(a).length_km);
  }
  for (const auto& a : arcs) model.add_variable(p_name(a), VarKind::Continuous, 0.0, big_m);
  for (const auto& a : arcs) model.add_variable(q_name(a), VarKind::Continuous, 0.0, big_m);
  std::vector<NodeId> feeding;  // substations with at least one candidate line
  for (NodeId s : substations) {
    if (out_arcs.count(s)) feeding.push_back(s);
  }
  for (NodeId s : feeding) {
    const double cap = big_m * static_cast<double>(out_arcs[s].size());
    model.add_variable("ps_" + std::to_string(s), VarKind::Continuous, 0.0, cap);
    model.add_variable("qs_" + std::to_string(s), VarKind::Continuous, 0.0, cap);
  }

  // No bidirectional branch.
  for (const auto& e : instance.edges()) {
    const Arc fwd{e.a, e.b}, back{e.b, e.a};
    model.add_constraint("oneway_" + arc_suffix(fwd),
                         {{model.variable(n_name(fwd)), 1.0}, {model.variable(n_name(back)), 1.0}},
                         Sense::LessEqual, 1.0);
  }
  // Consumer balance, net outflow = generation - demand.
  for (NodeId i : consumers) {
    const Node& node = instance.node(i);
    for (const bool active : {true, false}) {
      std::vector<LinearTerm> terms;
      for (const auto& a : out_arcs[i]) terms.push_back({model.variable(active ? p_name(a) : q_name(a)), 1.0});
      for (const auto& a : in_arcs[i]) terms.push_back({model.variable(active ? p_name(a) : q_name(a)), -1.0});
      const double rhs = active ? -node.net_p_kw() : -node.net_q_kvar();
      model.add_constraint((active ? "pbal_" : "qbal_") + std::to_string(i), std::move(terms), Sense::Equal, rhs);
    }
  }
  // Substation supply; the n_ij factor is implied by the big-M rows.
  for (NodeId s : feeding) {
    for (const bool active : {true, false}) {
      std::vector<LinearTerm> terms{{model.variable((active ? "ps_" : "qs_") + std::to_string(s)), 1.0}};
      for (const auto& a : out_arcs[s]) terms.push_back({model.variable(active ? p_name(a) : q_name(a)), -1.0});
      model.add_constraint((active ? "psub_" : "qsub_") + std::to_string(s), std::move(terms), Sense::Equal, 0.0);
    }
  }
  // 0 <= P, Q <= n M.
  for (const auto& a : arcs) {
    const auto n = model.variable(n_name(a));
    for (const bool active : {true, false}) {
      const auto f = model.variable(active ? p_name(a) : q_name(a));
      const std::string tag = active ? "p" : "q";
      model.add_constraint(tag + "cap_" + arc_suffix(a), {{f, 1.0}, {n, -big_m}}, Sense::LessEqual, 0.0);
      model.add_constraint(tag + "lo_" + arc_suffix(a), {{f, 1.0}}, Sense::GreaterEqual, 0.0);
    }
  }
  for (NodeId s : feeding) {
    const auto lim = instance.limits_of(s);
    const double cap = big_m * static_cast<double>(out_arcs[s].size());
    const auto ps = model.variable("ps_" + std::to_string(s));
    const auto qs = model.variable("qs_" + std::to_string(s));
    const std::string id = std::to_string(s);
    model.add_constraint("psub_lo_" + id, {{ps, 1.0}}, Sense::GreaterEqual, lim.p_min.value_or(0.0));
    model.add_constraint("psub_hi_" + id, {{ps, 1.0}}, Sense::LessEqual, lim.p_max.value_or(cap));
    model.add_constraint("qsub_lo_" + id, {{qs, 1.0}}, Sense::GreaterEqual, lim.q_min.value_or(0.0));
    model.add_constraint("qsub_hi_" + id, {{qs, 1.0}}, Sense::LessEqual, lim.q_max.value_or(cap));
  }
  if (!arcs.empty()) {
    std::vector<LinearTerm> terms;
    for (const auto& a : arcs) terms.push_back({model.variable(n_name(a)), 1.0});
    model.add_constraint("radial", std::move(terms), Sense::Equal,
                         static_cast<double>(instance.radial_edge_count()));
  }

  if (options.include_voltage) {
    const auto& sec = instance.security();
    const double u_min = std::pow(sec.v_min_kv * 1e3, 2);
    const double u_max = std::pow(sec.v_max_kv * 1e3, 2);
    for (const auto& node : instance.nodes()) {
      const double lo = node.is_substation() ? sec.u_rated() : u_min;
      const double hi = node.is_substation() ? sec.u_rated() : u_max;
      model.add_variable("u_" + std::to_string(node.id), VarKind::Continuous, lo, hi);
    }
    for (const auto& a : arcs) {
      const auto& e = instance.edge_of(a);
      const double r = 2.0 * e.resistance_ohm() * 1e3;
      const double x = 2.0 * e.reactance_ohm() * 1e3;
      const double m_u = (u_max - u_min) + (r + x) * big_m;
      const std::vector<LinearTerm> base{{model.variable("u_" + std::to_string(a.from)), 1.0},
                                         {model.variable("u_" + std::to_string(a.to)), -1.0},
                                         {model.variable(p_name(a)), -r},
                                         {model.variable(q_name(a)), -x}};
      auto upper = base;
      upper.push_back({model.variable(n_name(a)), m_u});
      model.add_constraint("vdrop_hi_" + arc_suffix(a), upper, Sense::LessEqual, m_u);
      auto lower = base;
      lower.push_back({model.variable(n_name(a)), -m_u});
      model.add_constraint("vdrop_lo_" + arc_suffix(a), lower, Sense::GreaterEqual, -m_u);
    }
  }

  if (options.security_enabled) {
    const double y_bar = instance.security().planning_bound();
    for (NodeId i : consumers) {
      for (const auto& a : arcs) model.add_variable(x_name(i, a), VarKind::Binary, 0.0, 1.0);
    }
    for (NodeId i : consumers) {
      const std::string id = std::to_string(i);
      for (const auto& a : arcs) {
        model.add_constraint("path_edge_" + id + "_" + arc_suffix(a),
                             {{model.variable(x_name(i, a)), 1.0}, {model.variable(n_name(a)), -1.0}},
                             Sense::LessEqual, 0.0);
      }
      for (const auto& e : instance.edges()) {
        const Arc fwd{e.a, e.b}, back{e.b, e.a};
        model.add_constraint("path_oneway_" + id + "_" + arc_suffix(fwd),
                             {{model.variable(x_name(i, fwd)), 1.0}, {model.variable(x_name(i, back)), 1.0}},
                             Sense::LessEqual, 1.0);
      }
      std::vector<LinearTerm> source;
      for (NodeId s : substations) {
        for (const auto& a : out_arcs[s]) source.push_back({model.variable(x_name(i, a)), 1.0});
        for (const auto& a : in_arcs[s]) source.push_back({model.variable(x_name(i, a)), -1.0});
      }
      model.add_constraint("path_src_" + id, std::move(source), Sense::Equal, 1.0);
      std::vector<LinearTerm> sink;
      for (const auto& a : out_arcs[i]) sink.push_back({model.variable(x_name(i, a)), 1.0});
      for (const auto& a : in_arcs[i]) sink.push_back({model.variable(x_name(i, a)), -1.0});
      model.add_constraint("path_dst_" + id, std::move(sink), Sense::Equal, -1.0);
      for (NodeId j : consumers) {
        if (j == i) continue;
        std::vector<LinearTerm> through;
        for (const auto& a : in_arcs[j]) through.push_back({model.variable(x_name(i, a)), 1.0});
        for (const auto& a : out_arcs[j]) through.push_back({model.variable(x_name(i, a)), -1.0});
        model.add_constraint("path_flow_" + id + "_" + std::to_string(j), std::move(through), Sense::Equal, 0.0);
      }
      std::vector<LinearTerm> deviation;
      for (const auto& a : arcs) {
        deviation.push_back({model.variable(x_name(i, a)), 2.0 * options.c0 * instance.edge_of(a).reactance_ohm()});
      }
      model.add_constraint("security_" + id, std::move(deviation), Sense::LessEqual, y_bar);
    }
  }
  return model;
}

std::vector<double> plan_assignment(const PlanningInstance& instance, const MilpModel& model,
                                    const Plan& plan) {
  std::vector<double> values(model.variable_count(), 0.0);
  auto set = [&](const std::string& name, double v) {
    if (model.has_variable(name)) values[model.variable(name)] = v;
  };
  const FlowSolution flows = compute_flows(instance, plan);
  for (const auto& f : flows.arcs) {
    set(n_name(f.arc), 1.0);
    set(p_name(f.arc), f.p_kw);
    set(q_name(f.arc), f.q_kvar);
  }
  for (const auto& [s, p] : flows.p_sub_kw) set("ps_" + std::to_string(s), p);
  for (const auto& [s, q] : flows.q_sub_kvar) set("qs_" + std::to_string(s), q);
  const RadialForest forest(instance, plan);
  for (NodeId i : instance.consumers()) {
    for (const Arc& a : forest.path(i)) set(x_name(i, a), 1.0);
  }
  for (const auto& [node, u] : compute_voltages(instance, plan, flows)) set("u_" + std::to_string(node), u);
  return values;
}

void emit_lp(const MilpModel& model, std::ostream& out) {
  const auto& vars = model.variables();
  auto write_terms = [&](const std::vector<LinearTerm>& terms) {
    std::size_t on_line = 0;
    for (const auto& t : terms) {
      if (on_line == 6) {
        out << "\n   ";
        on_line = 0;
      }
      out << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef)) << ' ' << vars[t.var].name;
      ++on_line;
    }
  };
  out << "\\ gridsec planning model: " << model.variable_count() << " variables ("
      << model.binary_count() << " binary), " << model.constraint_count() << " constraints\n";
  out << "Minimize\n obj:";
  write_terms(model.objective());
  out << "\nSubject To\n";
  for (const auto& c : model.constraints()) {
    out << ' ' << c.name << ':';
    write_terms(c.terms);
    out << (c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ")
        << format_number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : vars) {
    if (v.kind == VarKind::Binary) continue;
    out << ' ' << format_number(v.lower) << " <= " << v.name << " <= " << format_number(v.upper) << '\n';
  }
  out << "Binaries\n";
  std::size_t on_line = 0;
  for (const auto& v : vars) {
    if (v.kind != VarKind::Binary) continue;
    out << ' ' << v.name;
    if (++on_line == 10) {
      out << '\n';
      on_line = 0;
    }
  }
  if (on_line) out << '\n';
  out << "End\n";
}

void emit_lp(const MilpModel& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  emit_lp(model, out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace gridsec
