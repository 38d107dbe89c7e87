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

#include "gridsec/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridsec/attack_analysis.hpp"
#include "gridsec/distflow.hpp"
#include "gridsec/dynamics.hpp"
#include "gridsec/instance_io.hpp"
#include "gridsec/milp.hpp"
#include "gridsec/planner.hpp"
#include "gridsec/random_instance.hpp"

namespace gridsec {
namespace {

namespace fs = std::filesystem;

// Failure that maps directly onto an exit code.
struct CommandError : std::runtime_error {
  CommandError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

std::string grouped(double value, int decimals = 0) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(decimals) << std::abs(value);
  std::string digits = s.str();
  const auto dot = digits.find('.');
  std::string whole = digits.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : digits.substr(dot);
  for (int k = static_cast<int>(whole.size()) - 3; k > 0; k -= 3) whole.insert(k, ",");
  return (value < 0 ? "-" : "") + whole + frac;
}

std::string percent_change(double from, double to) {
  std::ostringstream s;
  s << std::showpos << std::fixed << std::setprecision(1) << 100.0 * (to - from) / from << '%';
  return s.str();
}

// Substations print as S1, S2, ... in ascending id order.
std::string node_label(const PlanningInstance& instance, NodeId id) {
  if (!instance.is_substation(id)) return std::to_string(id);
  const auto subs = instance.substations();
  const auto pos = std::find(subs.begin(), subs.end(), id) - subs.begin();
  return "S" + std::to_string(pos + 1);
}

std::vector<std::string> unused_edges(const PlanningInstance& instance, const Plan& plan) {
  std::vector<std::string> out;
  for (const auto& e : instance.edges()) {
    if (plan.contains({e.a, e.b}) || plan.contains({e.b, e.a})) continue;
    out.push_back(node_label(instance, e.a) + "-" + node_label(instance, e.b));
  }
  return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? sep : "") + items[k];
  return out;
}

fs::path resolve_out_dir(const std::string& flag) {
  fs::path dir = flag;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw CommandError(kExitInputError, "output directory not writable: " + dir.string());
  }
  return dir;
}

PlanningInstance read_instance(const std::string& path) {
  try {
    return load_instance(path);
  } catch (const std::exception& e) {
    throw CommandError(kExitInputError, path + ": " + e.what());
  }
}

Plan read_plan(const PlanningInstance& instance, const std::string& path) {
  PlanFile file;
  try {
    file = load_plan(path);
  } catch (const std::exception& e) {
    throw CommandError(kExitInputError, path + ": " + e.what());
  }
  if (file.instance_hash != instance.hash()) {
    throw CommandError(kExitMismatch, path + ": plan was built for instance " +
                                          file.instance_hash + ", not " + instance.hash());
  }
  if (const auto v = validate_radiality(instance, file.plan)) {
    throw CommandError(kExitInputError, path + ": " + v->message);
  }
  return file.plan;
}

void require_positive(double value, const std::string& name) {
  if (!(value > 0) || !std::isfinite(value)) {
    throw CommandError(kExitInputError, name + " must be positive and finite");
  }
}

int status_exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kExitOk;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::TimeLimit: return kExitTimeLimit;
  }
  return kExitInputError;
}

// ---------------------------------------------------------------- plan

struct PlanArgs {
  std::string instance;
  bool security = false;
  std::optional<double> c0;
  double time_limit = 600.0;
  std::string emit_lp;
  std::string out_dir;
  std::string plan_out;
  std::uint64_t seed = 0;
};

struct PlanColumn {
  std::string title;
  SolveResult result;
  PlanCost cost;
  TolerableAttack tolerable;
  double max_x = 0.0;
};

PlanColumn make_column(const PlanningInstance& instance, std::string title, SolveResult result) {
  PlanColumn col{std::move(title), std::move(result), {}, {}, 0.0};
  if (col.result.has_plan) {
    col.cost = plan_cost(instance, col.result.plan);
    col.tolerable = tolerable_attack_power(instance, col.result.plan);
    col.max_x = max_path_reactance(instance, col.result.plan);
  }
  return col;
}

void print_plan_table(std::ostream& out, const PlanningInstance& instance,
                      const std::vector<PlanColumn>& cols) {
  constexpr int kLabel = 30, kCell = 26;
  auto row = [&](const std::string& label, auto cell) {
    out << std::left << std::setw(kLabel) << label;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out << std::setw(kCell) << (cols[k].result.has_plan ? cell(k) : std::string("-"));
    }
    out << std::right << '\n';
  };
  const auto& base = cols.front();
  auto with_change = [&](std::size_t k, double v, double v0, int decimals = 0) {
    std::string s = grouped(v, decimals);
    if (k > 0 && base.result.has_plan) s += " (" + percent_change(v0, v) + ")";
    return s;
  };
  row("", [&](std::size_t k) { return cols[k].title; });
  row("Status", [&](std::size_t k) { return to_string(cols[k].result.status); });
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (!cols[k].result.has_plan) continue;
    out << "Unused edges (" << cols[k].title << "): "
        << join(unused_edges(instance, cols[k].result.plan), ", ") << '\n';
  }
  row("Total length [km]", [&](std::size_t k) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << selected_length_km(instance, cols[k].result.plan);
    return s.str();
  });
  row("Construction cost [US$]", [&](std::size_t k) {
    return with_change(k, cols[k].cost.construction, base.cost.construction);
  });
  row("Maintenance cost [US$]", [&](std::size_t k) {
    return with_change(k, cols[k].cost.maintenance, base.cost.maintenance);
  });
  row("Total cost [US$]",
      [&](std::size_t k) { return with_change(k, cols[k].cost.total, base.cost.total); });
  row("Max path reactance [ohm]", [&](std::size_t k) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << cols[k].max_x;
    return s.str();
  });
  row("Tolerable attack power [kW]", [&](std::size_t k) {
    return with_change(k, cols[k].tolerable.active_kw, base.tolerable.active_kw, 1);
  });
}

int cmd_plan(const PlanArgs& args, std::ostream& out) {
  const PlanningInstance instance = read_instance(args.instance);
  if (args.c0) require_positive(*args.c0, "--c0");
  require_positive(args.time_limit, "--time-limit");
  const double c0 = args.c0.value_or(instance.security().attack_budget_c0);
  const fs::path dir = resolve_out_dir(args.out_dir);

  std::ofstream log(dir / "solve.log");
  if (!log) throw CommandError(kExitInputError, "cannot write " + (dir / "solve.log").string());
  SolveOptions options;
  options.time_limit_s = args.time_limit;
  options.deterministic_seed = args.seed;
  options.log = &log;

  std::vector<PlanColumn> cols;
  cols.push_back(make_column(instance, "without security", solve_exact(instance, options)));
  if (args.security) {
    options.security_enabled = true;
    options.c0 = c0;
    cols.push_back(make_column(instance, "with security", solve_exact(instance, options)));
  }
  const PlanColumn& chosen = cols.back();

  if (!args.emit_lp.empty()) {
    MilpOptions mo;
    mo.security_enabled = args.security;
    mo.c0 = c0;
    const MilpModel model = build_milp(instance, mo);
    emit_lp(model, fs::path(args.emit_lp));
    out << "LP model: " << args.emit_lp << " (" << model.variable_count() << " variables, "
        << model.binary_count() << " binaries, " << model.constraint_count() << " constraints)\n";
  }

  out << "Instance " << args.instance << " (hash " << instance.hash() << ")";
  if (args.security) out << ", C0 = " << c0;
  out << "\n\n";
  print_plan_table(out, instance, cols);

  if (chosen.result.has_plan) {
    const fs::path plan_path = args.plan_out.empty()
                                   ? dir / (args.security ? "plan_secure.json" : "plan_insecure.json")
                                   : fs::path(args.plan_out);
    save_plan(plan_path, instance, chosen.result.plan);
    nlohmann::json cost = {{"construction_usd", chosen.cost.construction},
                           {"maintenance_usd", chosen.cost.maintenance},
                           {"total_usd", chosen.cost.total},
                           {"length_km", selected_length_km(instance, chosen.result.plan)},
                           {"status", to_string(chosen.result.status)},
                           {"explored_nodes", chosen.result.explored_nodes},
                           {"security", args.security},
                           {"tolerable_active_kw", chosen.tolerable.active_kw}};
    if (args.security) cost["c0"] = c0;
    write_text_file(plan_path.parent_path() / (plan_path.stem().string() + "_cost.json"),
                    cost.dump(2) + "\n");
    out << "\nPlan written to " << plan_path.string() << '\n';
  } else {
    out << "\nNo plan satisfies the constraints.\n";
  }
  return status_exit_code(chosen.result.status);
}

// ---------------------------------------------------------------- assess

struct AssessArgs {
  std::string instance, plan;
  std::optional<double> c0;
  std::size_t top_k = 3;
  std::string json_out;
};

int cmd_assess(const AssessArgs& args, std::ostream& out) {
  const PlanningInstance instance = read_instance(args.instance);
  const Plan plan = read_plan(instance, args.plan);
  if (args.c0) require_positive(*args.c0, "--c0");
  const double c0 = args.c0.value_or(instance.security().attack_budget_c0);
  const VulnerabilityReport report = assess(instance, plan, c0, args.top_k);
  print_report(out, report);
  if (!args.json_out.empty()) write_text_file(args.json_out, report_to_json(report));
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string instance, plan;
  NodeId target = 0;
  std::optional<double> c0;
  double flip_time = 4.0;
  double horizon = 8.0;
  double dt = 0.01;
  std::string csv_out;
  std::string out_dir;
};

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const PlanningInstance instance = read_instance(args.instance);
  const Plan plan = read_plan(instance, args.plan);
  if (!instance.has_node(args.target) || instance.is_substation(args.target)) {
    throw CommandError(kExitMismatch, "unknown target consumer " + std::to_string(args.target));
  }
  const double c0 = args.c0.value_or(instance.security().attack_budget_c0);
  if (c0 < 0 || !std::isfinite(c0)) throw CommandError(kExitInputError, "--c0 must be >= 0");
  if (args.flip_time < 0) throw CommandError(kExitInputError, "--flip-time must be >= 0");
  require_positive(args.horizon, "--horizon");
  require_positive(args.dt, "--dt");

  const GridDynamics dyn = GridDynamics::for_target(instance, plan, args.target);
  const AttackScenario scenario{args.target, c0, args.flip_time, args.horizon, +1};
  const Response response = simulate_response(dyn, scenario, args.dt);

  const fs::path csv = args.csv_out.empty()
                           ? resolve_out_dir(args.out_dir) /
                                 ("response_" + std::to_string(args.target) + ".csv")
                           : fs::path(args.csv_out);
  std::ostringstream body;
  write_response_csv(body, response, instance.security().u_rated());
  write_text_file(csv, body.str());

  const double y_bar = instance.security().y_bar();
  out << std::setprecision(6) << "target " << args.target << ", C0 = " << c0
      << ", flip at " << args.flip_time << " s, dominant time constant "
      << dyn.dominant_time_constant() << " s\n"
      << "peak |y| = " << response.peak_abs_y << " V^2, tolerable y_bar = " << y_bar
      << " V^2, exceeded: " << (response.peak_abs_y > y_bar ? "yes" : "no") << '\n'
      << "series written to " << csv.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string instance;
  std::vector<std::string> plans;
  std::string c0_grid;
  std::string csv_out;
  std::string out_dir;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(v >= 0) || !std::isfinite(v)) {
      throw CommandError(kExitInputError, "bad --c0-grid entry '" + item + "'");
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw CommandError(kExitInputError, "--c0-grid is empty");
  return grid;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
  const PlanningInstance instance = read_instance(args.instance);
  std::vector<LabeledPlan> plans;
  for (const auto& path : args.plans) {
    plans.push_back({fs::path(path).stem().string(), read_plan(instance, path)});
  }
  std::vector<double> grid;
  if (args.c0_grid.empty()) {
    for (int k = 1; k <= 10; ++k) grid.push_back(1e6 * k);
  } else {
    grid = parse_grid(args.c0_grid);
  }
  const auto rows = budget_sweep(instance, plans, grid);
  const fs::path csv =
      args.csv_out.empty() ? resolve_out_dir(args.out_dir) / "sweep.csv" : fs::path(args.csv_out);
  std::ostringstream body;
  write_sweep_csv(body, rows);
  write_text_file(csv, body.str());
  out << "y_bar = " << instance.security().y_bar() << " V^2\n";
  for (const auto& p : plans) {
    const auto tol = tolerable_attack_power(instance, p.plan);
    out << std::left << std::setw(24) << p.label << std::right << " slope "
        << std::setprecision(6) << 2.0 * max_path_reactance(instance, p.plan)
        << " V^2 per unit C0, crosses y_bar at C0 = " << std::setprecision(8) << tol.c0_max
        << '\n';
  }
  out << rows.size() << " rows written to " << csv.string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::string instance;
  std::size_t random_nodes = 0;
  std::uint64_t seed = 0;
  bool security = false;
  std::optional<double> c0;
  std::size_t cap = 10;
};

int cmd_oracle(const OracleArgs& args, std::ostream& out) {
  if (args.instance.empty() == (args.random_nodes == 0)) {
    throw CommandError(kExitInputError, "give exactly one of an instance path or --random-nodes");
  }
  std::optional<PlanningInstance> instance;
  if (args.random_nodes) {
    if (args.random_nodes < 2) throw CommandError(kExitInputError, "--random-nodes must be >= 2");
    std::mt19937_64 rng(args.seed);
    RandomInstanceOptions ro;
    ro.substations = args.random_nodes >= 6 ? 2 : 1;
    ro.consumers = args.random_nodes - ro.substations;
    ro.extra_edges = ro.consumers;
    ro.regime = SecurityRegime::Binding;
    instance = random_instance(ro, rng);
  } else {
    instance = read_instance(args.instance);
  }
  if (instance->nodes().size() > args.cap) {
    throw CommandError(kExitGuard, "instance has " + std::to_string(instance->nodes().size()) +
                                       " nodes and exceeds oracle cap " +
                                       std::to_string(args.cap));
  }
  SolveOptions options;
  options.security_enabled = args.security;
  options.c0 = args.c0.value_or(instance->security().attack_budget_c0);
  options.node_cap_for_oracle = args.cap;
  options.deterministic_seed = args.seed;
  const SolveResult oracle = enumerate_forests(*instance, options);
  const SolveResult solver = solve_exact(*instance, options);
  const bool pass = oracle.status == solver.status &&
                    (!oracle.has_plan || oracle.objective == solver.objective);
  out << std::setprecision(12) << "enumeration : " << to_string(oracle.status);
  if (oracle.has_plan) out << " objective " << oracle.objective;
  out << " (" << oracle.explored_nodes << " selections)\n"
      << "branch&bound: " << to_string(solver.status);
  if (solver.has_plan) out << " objective " << solver.objective;
  out << " (" << solver.explored_nodes << " nodes)\n" << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitMismatch;
}

// ---------------------------------------------------------------- export

struct ExportArgs {
  std::string instance, plan;
  std::string out_dir;
};

int cmd_export(const ExportArgs& args, std::ostream& out) {
  const PlanningInstance instance = read_instance(args.instance);
  const Plan plan = read_plan(instance, args.plan);
  const fs::path dir = resolve_out_dir(args.out_dir);
  const FlowSolution flows = compute_flows(instance, plan);
  const VoltageProfile u = compute_voltages(instance, plan, flows);
  std::ostringstream f, v;
  write_flow_csv(f, flows);
  write_voltage_csv(v, u);
  write_text_file(dir / "flows.csv", f.str());
  write_text_file(dir / "voltages.csv", v.str());
  const auto report = check_static_limits(instance, plan, flows, u);
  out << "flows.csv and voltages.csv written to " << dir.string() << '\n'
      << report.violations.size() << " static limit violation(s)\n";
  for (const auto& viol : report.violations) out << "  " << viol.message << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secure radial distribution network planning against inverter attacks"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Solve the planning problem and print a cost summary");
  plan->add_option("instance", plan_args.instance, "Instance JSON")->required();
  plan->add_flag("--security", plan_args.security, "Enforce the attack-resilience bound");
  plan->add_option("--c0", plan_args.c0, "Attack budget (default: instance value)");
  plan->add_option("--time-limit", plan_args.time_limit, "Search time limit, seconds");
  plan->add_option("--emit-lp", plan_args.emit_lp, "Also write the MILP in LP format");
  plan->add_option("--out", plan_args.out_dir, "Output directory");
  plan->add_option("--plan-out", plan_args.plan_out, "Plan JSON path");
  plan->add_option("--seed", plan_args.seed, "Run seed (recorded in the log)");

  AssessArgs assess_args;
  auto* assess_cmd = app.add_subcommand("assess", "Rank vulnerable consumers of a plan");
  assess_cmd->add_option("instance", assess_args.instance, "Instance JSON")->required();
  assess_cmd->add_option("plan", assess_args.plan, "Plan JSON")->required();
  assess_cmd->add_option("--c0", assess_args.c0, "Attack budget");
  assess_cmd->add_option("--top-k", assess_args.top_k, "Number of nodes to list");
  assess_cmd->add_option("--json", assess_args.json_out, "Write the report as JSON");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Simulate the worst-case attack response");
  sim->add_option("instance", sim_args.instance, "Instance JSON")->required();
  sim->add_option("plan", sim_args.plan, "Plan JSON")->required();
  sim->add_option("--target", sim_args.target, "Attacked consumer")->required();
  sim->add_option("--c0", sim_args.c0, "Attack budget");
  sim->add_option("--flip-time", sim_args.flip_time, "Sign switch instant, seconds");
  sim->add_option("--horizon", sim_args.horizon, "Simulated time, seconds");
  sim->add_option("--dt", sim_args.dt, "Sampling step, seconds");
  sim->add_option("--csv", sim_args.csv_out, "Output CSV path");
  sim->add_option("--out", sim_args.out_dir, "Output directory");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Worst-case deviation versus attack budget");
  sweep->add_option("instance", sweep_args.instance, "Instance JSON")->required();
  sweep->add_option("plans", sweep_args.plans, "Plan JSON files")->required();
  sweep->add_option("--c0-grid", sweep_args.c0_grid, "Comma-separated budgets");
  sweep->add_option("--csv", sweep_args.csv_out, "Output CSV path");
  sweep->add_option("--out", sweep_args.out_dir, "Output directory");

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Check the solver against exhaustive enumeration");
  oracle->add_option("instance", oracle_args.instance, "Instance JSON");
  oracle->add_option("--random-nodes", oracle_args.random_nodes, "Use a random instance");
  oracle->add_option("--seed", oracle_args.seed, "Random instance seed");
  oracle->add_flag("--security", oracle_args.security, "Enforce the attack-resilience bound");
  oracle->add_option("--c0", oracle_args.c0, "Attack budget");
  oracle->add_option("--cap", oracle_args.cap, "Largest node count to enumerate");

  ExportArgs export_args;
  auto* exp = app.add_subcommand("export", "Write power flow and voltage CSVs for a plan");
  exp->add_option("instance", export_args.instance, "Instance JSON")->required();
  exp->add_option("plan", export_args.plan, "Plan JSON")->required();
  exp->add_option("--out", export_args.out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*plan) return cmd_plan(plan_args, out);
    if (*assess_cmd) return cmd_assess(assess_args, out);
    if (*sim) return cmd_simulate(sim_args, out);
    if (*sweep) return cmd_sweep(sweep_args, out);
    if (*oracle) return cmd_oracle(oracle_args, out);
    if (*exp) return cmd_export(export_args, out);
  } catch (const CommandError& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const OracleCapError& e) {
    err << "error: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace gridsec
