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

#include <cstddef>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridsec/grid_model.hpp"

namespace gridsec {

enum class VarKind { Binary, Continuous };
enum class Sense { LessEqual, GreaterEqual, Equal };

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;
};

struct MilpConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// Solver-agnostic minimization model.
class MilpModel {
 public:
  std::size_t add_variable(std::string name, VarKind kind, double lower, double upper);
  void add_constraint(std::string name, std::vector<LinearTerm> terms, Sense sense, double rhs);
  void add_objective_term(std::size_t var, double coef);

  const std::vector<MilpVariable>& variables() const { return variables_; }
  const std::vector<MilpConstraint>& constraints() const { return constraints_; }
  const std::vector<LinearTerm>& objective() const { return objective_; }

  std::size_t variable_count() const { return variables_.size(); }
  std::size_t binary_count() const;
  std::size_t constraint_count() const { return constraints_.size(); }
  /// Index of a variable by name; throws std::out_of_range when absent.
  std::size_t variable(const std::string& name) const { return by_name_.at(name); }
  bool has_variable(const std::string& name) const { return by_name_.count(name) != 0; }

  double objective_value(const std::vector<double>& values) const;
  /// Names of rows or bounds violated by more than `tol` (scaled by row magnitude).
  std::vector<std::string> violations(const std::vector<double>& values, double tol = 1e-7) const;

 private:
  std::vector<MilpVariable> variables_;
  std::vector<MilpConstraint> constraints_;
  std::vector<LinearTerm> objective_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

struct MilpOptions {
  bool security_enabled = false;
  double c0 = 0.0;
  /// Adds squared-voltage variables with big-M disjunctive drop rows.
  bool include_voltage = false;
};

/// Planning model: orientation pairing, nodal and substation balance,
/// big-M flow coupling, radial cardinality and, when enabled, per-consumer
/// path variables with the worst-case deviation bound.
MilpModel build_milp(const PlanningInstance& instance, const MilpOptions& options);

/// Variable assignment that a plan induces on build_milp's model.
std::vector<double> plan_assignment(const PlanningInstance& instance, const MilpModel& model,
                                    const Plan& plan);

/// CPLEX-style LP text: objective, constraints, bounds, binaries.
void emit_lp(const MilpModel& model, std::ostream& out);
void emit_lp(const MilpModel& model, const std::filesystem::path& path);

}  // namespace gridsec
