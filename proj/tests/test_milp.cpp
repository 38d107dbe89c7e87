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
#include "gridsec/milp.hpp"
#include "gridsec/planner.hpp"
#include "gridsec/random_instance.hpp"

using namespace gridsec;
using namespace gridsec::testing;

namespace {

std::string lp_text(const MilpModel& model) {
  std::ostringstream out;
  emit_lp(model, out);
  return out.str();
}

std::string section(const std::string& text, const std::string& head, const std::string& next) {
  const auto a = text.find(head);
  const auto b = text.find(next, a);
  return text.substr(a, b - a);
}

}  // namespace

TEST_CASE("benchmark model sizes") {
  const auto& inst = benchmark();
  const MilpModel plain = build_milp(inst, {});
  CHECK(plain.variable_count() == 350);
  CHECK(plain.binary_count() == 114);
  CHECK(plain.constraint_count() == 638);
  const MilpModel secure = build_milp(inst, {true, 5.55e6, false});
  CHECK(secure.variable_count() == 6050);
  CHECK(secure.binary_count() == 5814);
  CHECK(std::abs(static_cast<double>(secure.constraint_count()) - 11838.0) <= 0.05 * 11838.0);
}

TEST_CASE("one candidate line gives two binaries and the one-way row") {
  const auto inst = make_instance({consumer(1, 10, 5), substation(2)}, {edge(2, 1, 2.0)});
  const MilpModel model = build_milp(inst, {});
  CHECK(model.binary_count() == 2);
  const std::string text = lp_text(model);
  CHECK(text.find("oneway_") != std::string::npos);
  const std::string binaries = section(text, "Binaries", "End");
  CHECK(binaries.find("n_2_1") != std::string::npos);
  CHECK(binaries.find("n_1_2") != std::string::npos);
}

TEST_CASE("an instance without consumers emits an objective-only file") {
  const auto inst = make_instance({substation(1)}, {});
  const MilpModel model = build_milp(inst, {});
  CHECK(model.variable_count() == 0);
  CHECK(model.constraint_count() == 0);
  const std::string text = lp_text(model);
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("LP text keeps every row and declares every binary") {
  const auto inst = ten_node_instance();
  const MilpModel model = build_milp(inst, {true, 1e6, false});
  const std::string text = lp_text(model);
  for (const auto& c : model.constraints()) CHECK(text.find(" " + c.name + ":") != std::string::npos);
  const std::string binaries = section(text, "Binaries", "End");
  for (const auto& v : model.variables()) {
    if (v.kind == VarKind::Binary) CHECK(binaries.find(v.name) != std::string::npos);
  }
}

TEST_CASE("a radial plan induces an assignment that satisfies every row") {
  const auto inst = ten_node_instance();
  const Plan plan = ten_node_plan();
  const double c0 = 0.9 * path_reactance_limit(inst, 1.0) / max_path_reactance(inst, plan);
  const MilpModel model = build_milp(inst, {true, c0, true});
  const auto values = plan_assignment(inst, model, plan);
  CHECK(model.violations(values).empty());
  CHECK(model.objective_value(values) == doctest::Approx(plan_cost(inst, plan).total).epsilon(1e-12));
}

TEST_CASE("the security rows cut plans whose worst path is too reactive") {
  const auto inst = ten_node_instance();
  const Plan plan = ten_node_plan();
  const double c_edge = path_reactance_limit(inst, 1.0) / max_path_reactance(inst, plan);
  const MilpModel tight = build_milp(inst, {true, 1.01 * c_edge, false});
  const auto violated = tight.violations(plan_assignment(inst, tight, plan));
  REQUIRE_FALSE(violated.empty());
  for (const auto& name : violated) CHECK(name.rfind("security_", 0) == 0);
}

TEST_CASE("solver optima are feasible model points on random instances") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 rng(seed);
    RandomInstanceOptions ro;
    ro.consumers = 2 + seed % 6;
    ro.substations = 1 + seed % 2;
    const auto inst = random_instance(ro, rng);
    SolveOptions opt;
    opt.security_enabled = true;
    opt.c0 = inst.security().attack_budget_c0;
    const SolveResult r = solve_exact(inst, opt);
    REQUIRE(r.has_plan);
    const MilpModel model = build_milp(inst, {true, opt.c0, false});
    const auto values = plan_assignment(inst, model, r.plan);
    CHECK(model.violations(values).empty());
    CHECK(model.objective_value(values) == doctest::Approx(r.objective).epsilon(1e-12));
  }
}
