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

#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "gridsec/distflow.hpp"
#include "gridsec/planner.hpp"
#include "gridsec/random_instance.hpp"

using namespace gridsec;
using namespace gridsec::testing;

TEST_CASE("one arc carries the leaf's net demand") {
  const auto inst = make_instance({consumer(1, 70, 50), substation(2)}, {edge(2, 1, 1.0)});
  const Plan plan({{2, 1}});
  const FlowSolution f = compute_flows(inst, plan);
  REQUIRE(f.find({2, 1}) != nullptr);
  CHECK(f.find({2, 1})->p_kw == 70.0);
  CHECK(f.find({2, 1})->q_kvar == 50.0);
  CHECK(f.p_sub_kw.at(2) == 70.0);
  CHECK(f.q_sub_kvar.at(2) == 50.0);
}

TEST_CASE("arc flows equal subtree net demand in the ten-node example") {
  const auto inst = ten_node_instance();
  const Plan plan = ten_node_plan();
  const FlowSolution f = compute_flows(inst, plan);
  for (const Arc& a : plan.arcs()) {
    const auto [p, q] = naive_subtree_demand(inst, plan, a.to);
    CHECK(f.find(a)->p_kw == doctest::Approx(p).epsilon(1e-12));
    CHECK(f.find(a)->q_kvar == doctest::Approx(q).epsilon(1e-12));
  }
  const auto [p4, q4] = naive_subtree_demand(inst, plan, 4);
  CHECK(p4 == doctest::Approx(inst.node(4).net_p_kw() + inst.node(3).net_p_kw()));
  CHECK(q4 == doctest::Approx(inst.node(4).net_q_kvar() + inst.node(3).net_q_kvar()));
}

TEST_CASE("a net exporting subtree is rejected with its arc") {
  Node exporter = consumer(1, 10, 10);
  exporter.p_gen_kw = 30;
  const auto inst = make_instance({exporter, substation(2)}, {edge(2, 1, 1.0)});
  try {
    compute_flows(inst, Plan({{2, 1}}));
    FAIL("expected FlowError");
  } catch (const FlowError& e) {
    CHECK(e.arc() == Arc{2, 1});
  }
}

TEST_CASE("line graph flows are suffix sums of net demand") {
  std::vector<Node> nodes;
  std::vector<CandidateEdge> edges;
  std::vector<Arc> arcs;
  const int n = 12;
  for (NodeId i = 1; i <= n; ++i) {
    nodes.push_back(consumer(i, 10.0 * i, 3.0 * i, 0.25));
    edges.push_back(edge(i - 1 == 0 ? 100 : i - 1, i, 0.5));
    arcs.push_back({i - 1 == 0 ? 100 : i - 1, i});
  }
  nodes.push_back(substation(100));
  const auto inst = make_instance(nodes, edges);
  const FlowSolution f = compute_flows(inst, Plan(arcs));
  for (NodeId i = 1; i <= n; ++i) {
    double p = 0.0;
    for (NodeId j = i; j <= n; ++j) p += 0.75 * 10.0 * j;
    CHECK(f.find(arcs[static_cast<std::size_t>(i - 1)])->p_kw == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("voltage drop across one arc") {
  const auto inst = make_instance({consumer(1, 100, 50), substation(2)}, {edge(2, 1, 1.0)});
  const Plan plan({{2, 1}});
  const auto u = compute_voltages(inst, plan, compute_flows(inst, plan));
  CHECK(u.at(2) == 2.25e8);
  CHECK(u.at(1) == doctest::Approx(2.25e8 - 98300.0).epsilon(1e-12));
  const CandidateEdge& e = inst.edges().front();
  CHECK(voltage_drop_v2(e, -100, -50) == -voltage_drop_v2(e, 100, 50));
}

TEST_CASE("zero load keeps every node at rated voltage") {
  const auto inst = make_instance({consumer(1, 0, 0), consumer(2, 0, 0), substation(3)},
                                  {edge(3, 1, 1.0), edge(1, 2, 2.0)});
  const Plan plan({{3, 1}, {1, 2}});
  for (const auto& [node, u] : compute_voltages(inst, plan, compute_flows(inst, plan))) {
    CHECK(u == 2.25e8);
  }
}

TEST_CASE("random plans conserve power and voltage falls along every path") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    RandomInstanceOptions ro;
    ro.consumers = 2 + seed % 12;
    ro.substations = 1 + seed % 3;
    const auto inst = random_instance(ro, rng);
    const Plan plan = random_radial_plan(inst, rng);
    const FlowSolution f = compute_flows(inst, plan);
    double demand_p = 0.0, demand_q = 0.0, sub_p = 0.0, sub_q = 0.0;
    for (NodeId c : inst.consumers()) {
      demand_p += inst.node(c).net_p_kw();
      demand_q += inst.node(c).net_q_kvar();
    }
    for (const auto& [s, p] : f.p_sub_kw) sub_p += p;
    for (const auto& [s, q] : f.q_sub_kvar) sub_q += q;
    CHECK(sub_p == doctest::Approx(demand_p).epsilon(1e-12));
    CHECK(sub_q == doctest::Approx(demand_q).epsilon(1e-12));
    // Nodal balance: inflow = own demand + outflow.
    for (NodeId c : inst.consumers()) {
      double in = 0.0, out = 0.0;
      for (const auto& a : f.arcs) {
        if (a.arc.to == c) in += a.p_kw;
        if (a.arc.from == c) out += a.p_kw;
      }
      CHECK(std::abs(in - out - inst.node(c).net_p_kw()) < 1e-9 * demand_p);
    }
    const auto u = compute_voltages(inst, plan, f);
    for (const Arc& a : plan.arcs()) CHECK(u.at(a.to) <= u.at(a.from));
  }
}

TEST_CASE("static limit checks") {
  const auto inst = make_instance({consumer(1, 100, 50), substation(2)}, {edge(2, 1, 1.0)}, 5.55e6,
                                  1000.0);
  const Plan plan({{2, 1}});
  SUBCASE("flow above big-M") {
    FlowSolution f = compute_flows(inst, plan);
    f.arcs.front().p_kw = 1001.0;
    const auto report = check_static_limits(inst, plan, f, {});
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().kind == LimitKind::FlowAboveBigM);
  }
  SUBCASE("flow on an unselected arc") {
    FlowSolution f = compute_flows(inst, plan);
    f.arcs.push_back({{1, 2}, 5.0, 0.0});
    const auto report = check_static_limits(inst, plan, f, {});
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().kind == LimitKind::FlowOnUnselected);
  }
  SUBCASE("undervoltage at a deep leaf under inflated demand") {
    const auto heavy = make_instance(
        {consumer(1, 1, 0.5), consumer(2, 1, 0.5), consumer(3, 2000, 1000), substation(4)},
        {edge(4, 1, 0.2), edge(1, 2, 0.2), edge(2, 3, 3.0)});
    const Plan line({{4, 1}, {1, 2}, {2, 3}});
    const auto f = compute_flows(heavy, line);
    CHECK(check_static_limits(heavy, line, f, compute_voltages(heavy, line, f)).ok());
    std::vector<Node> scaled = heavy.nodes();
    for (auto& n : scaled) {
      n.p_demand_kw *= 10;
      n.q_demand_kvar *= 10;
    }
    const auto ten_x = PlanningInstance(scaled, heavy.edges(), heavy.line(), heavy.econ(),
                                        heavy.security(), heavy.big_m_kw());
    const auto f10 = compute_flows(ten_x, line);
    const auto report = check_static_limits(ten_x, line, f10, compute_voltages(ten_x, line, f10));
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations.front().kind == LimitKind::VoltageLow);
    CHECK(report.violations.front().node == std::optional<NodeId>(3));
  }
}

TEST_CASE("benchmark optimum respects the flow limits") {
  const auto& inst = benchmark();
  const SolveResult r = solve_exact(inst, {});
  REQUIRE(r.has_plan);
  const auto f = compute_flows(inst, r.plan);
  for (const auto& a : f.arcs) CHECK(a.p_kw <= inst.big_m_kw());
  // Voltage is not part of the planning model, so only flow rules are asserted.
  const auto report = check_static_limits(inst, r.plan, f, {});
  CHECK(report.ok());
}
