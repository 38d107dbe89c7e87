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
#include <sstream>

#include "fixtures.hpp"
#include "gridsec/attack_analysis.hpp"
#include "gridsec/planner.hpp"
#include "gridsec/random_instance.hpp"

using namespace gridsec;
using namespace gridsec::testing;

namespace {

std::vector<std::string> unused(const PlanningInstance& inst, const Plan& plan) {
  std::vector<std::string> out;
  const auto subs = inst.substations();
  auto label = [&](NodeId id) {
    if (!inst.is_substation(id)) return std::to_string(id);
    return "S" + std::to_string(std::find(subs.begin(), subs.end(), id) - subs.begin() + 1);
  };
  for (const auto& e : inst.edges()) {
    if (!plan.contains({e.a, e.b}) && !plan.contains({e.b, e.a})) out.push_back(label(e.a) + "-" + label(e.b));
  }
  std::sort(out.begin(), out.end());
  return out;
}

PlanningInstance random_small(std::uint64_t seed, SecurityRegime regime) {
  std::mt19937_64 rng(seed);
  RandomInstanceOptions ro;
  ro.substations = 1 + seed % 2;
  ro.consumers = 8 - ro.substations - seed % 3;
  ro.extra_edges = 2 + seed % 5;
  ro.regime = regime;
  return random_instance(ro, rng);
}

}  // namespace

TEST_CASE("benchmark without security") {
  const auto& inst = benchmark();
  const SolveResult r = solve_exact(inst, {});
  REQUIRE(r.status == SolveStatus::Optimal);
  const PlanCost c = plan_cost(inst, r.plan);
  CHECK(c.construction == doctest::Approx(367300).epsilon(5e-3));
  CHECK(c.maintenance == doctest::Approx(223470).epsilon(5e-3));
  CHECK(r.objective == doctest::Approx(c.total));
  // Reported as a diagnostic: the unused lines match the reference benchmark plan.
  std::vector<std::string> expected = {"44-38", "38-34", "39-32", "S4-22", "30-43", "37-31", "31-10"};
  std::sort(expected.begin(), expected.end());
  CHECK(unused(inst, r.plan) == expected);
}

TEST_CASE("benchmark with security") {
  const auto& inst = benchmark();
  SolveOptions opt;
  opt.security_enabled = true;
  opt.c0 = 5.55e6;
  const SolveResult r = solve_exact(inst, opt);
  REQUIRE(r.status == SolveStatus::Optimal);
  const PlanCost c = plan_cost(inst, r.plan);
  CHECK(c.construction == doctest::Approx(375000).epsilon(5e-3));
  CHECK(c.maintenance == doctest::Approx(228150).epsilon(5e-3));
  CHECK(security_check(inst, r.plan, opt.c0, inst.security().planning_bound()).secure);
  // Seven lines stay unbuilt; the optimum is degenerate, so only the count is pinned.
  CHECK(unused(inst, r.plan).size() == 7);
}

TEST_CASE("triangle: minimum spanning tree, equal to enumeration") {
  const auto inst = triangle_instance();
  const SolveResult r = solve_exact(inst, {});
  const SolveResult o = enumerate_forests(inst, {});
  REQUIRE(r.has_plan);
  CHECK(r.plan == Plan({{3, 1}, {1, 2}}));
  CHECK(r.objective == o.objective);
  CHECK(selected_length_km(inst, r.plan) == 3.5);
}

TEST_CASE("the oracle refuses instances above its cap") {
  CHECK_THROWS_AS(enumerate_forests(benchmark(), {}), OracleCapError);
  SolveOptions opt;
  opt.node_cap_for_oracle = 2;
  CHECK_THROWS_AS(enumerate_forests(triangle_instance(), opt), OracleCapError);
}

TEST_CASE("branch-and-bound equals enumeration on random instances") {
  int binding = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (const auto regime : {SecurityRegime::Slack, SecurityRegime::Binding, SecurityRegime::Infeasible}) {
      const auto inst = random_small(seed, regime);
      for (const bool secure : {false, true}) {
        SolveOptions opt;
        opt.security_enabled = secure;
        opt.c0 = inst.security().attack_budget_c0;
        const SolveResult a = solve_exact(inst, opt);
        const SolveResult b = enumerate_forests(inst, opt);
        CHECK(a.status == b.status);
        REQUIRE(a.has_plan == b.has_plan);
        if (a.has_plan) CHECK(a.objective == b.objective);
        if (secure && regime == SecurityRegime::Infeasible) CHECK(a.status == SolveStatus::Infeasible);
        if (secure && regime == SecurityRegime::Binding) {
          CHECK(a.status == SolveStatus::Optimal);
          const SolveResult plain = solve_exact(inst, {});
          if (a.objective > plain.objective) ++binding;
        }
      }
    }
  }
  // The generator's budgets actually bind in a good share of cases.
  CHECK(binding >= 10);
}

TEST_CASE("secure feasibility matches the best achievable worst path") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = random_small(seed, seed % 2 ? SecurityRegime::Binding : SecurityRegime::Infeasible);
    SolveOptions opt;
    opt.security_enabled = true;
    opt.c0 = inst.security().attack_budget_c0;
    const bool feasible = solve_exact(inst, opt).has_plan;
    CHECK(feasible == (min_max_path_reactance(inst) <= path_reactance_limit(inst, opt.c0)));
  }
}

TEST_CASE("cost is monotone in the attack budget") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto inst = random_small(seed, SecurityRegime::Binding);
    const double base = solve_exact(inst, {}).objective;
    const double c_hi = path_reactance_limit(inst, 1.0) / min_max_path_reactance(inst);
    double previous = base;
    for (int k = 1; k <= 8; ++k) {
      SolveOptions opt;
      opt.security_enabled = true;
      opt.c0 = c_hi * (1.0 - 1e-9) * k / 8.0;
      const SolveResult r = solve_exact(inst, opt);
      REQUIRE(r.has_plan);
      CHECK(r.objective >= previous);
      CHECK(r.objective >= base);
      previous = r.objective;
    }
  }
}

TEST_CASE("identical inputs give identical plans, node counts and logs") {
  const auto inst = random_small(9, SecurityRegime::Binding);
  SolveOptions opt;
  opt.security_enabled = true;
  opt.c0 = inst.security().attack_budget_c0;
  std::ostringstream log_a, log_b;
  opt.log = &log_a;
  const SolveResult a = solve_exact(inst, opt);
  opt.log = &log_b;
  const SolveResult b = solve_exact(inst, opt);
  CHECK(a.plan == b.plan);
  CHECK(a.explored_nodes == b.explored_nodes);
  CHECK(a.objective == b.objective);
  CHECK(log_a.str().find("incumbent") != std::string::npos);
  CHECK(log_a.str().find("explored=") != std::string::npos);
}

TEST_CASE("a zero-effort time limit reports the limit") {
  std::mt19937_64 rng(1);
  RandomInstanceOptions ro;
  ro.consumers = 40;
  ro.extra_edges = 120;
  const auto inst = random_instance(ro, rng);
  SolveOptions opt;
  opt.security_enabled = true;
  opt.c0 = inst.security().attack_budget_c0;
  opt.time_limit_s = 1e-9;
  const SolveResult r = solve_exact(inst, opt);
  CHECK(r.status == SolveStatus::TimeLimit);
  CHECK_THROWS_AS(solve_exact(inst, SolveOptions{false, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("substation supply limits are honoured") {
  const auto base = triangle_instance();
  // Two substations; the cheap one may only carry 100 kW, so consumer 2
  // (150 kW) must be fed by the other.
  std::vector<Node> nodes = {consumer(1, 90, 40), consumer(2, 150, 80), substation(3), substation(4)};
  std::vector<CandidateEdge> edges = {edge(3, 1, 1.0), edge(1, 2, 1.5), edge(4, 2, 3.0)};
  std::unordered_map<NodeId, SubstationLimits> limits;
  limits[3].p_max = 100.0;
  const PlanningInstance inst(nodes, edges, base.line(), base.econ(), base.security(), 60000.0, limits);
  const SolveResult r = solve_exact(inst, {});
  REQUIRE(r.has_plan);
  CHECK(r.plan == Plan({{3, 1}, {4, 2}}));
  CHECK(enumerate_forests(inst, {}).objective == r.objective);
}
