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

#include "gridsec/attack_analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>

#include <json.hpp>

#include "gridsec/dynamics.hpp"

namespace gridsec {
namespace {

std::vector<VulnerableNode> all_ranked(const PlanningInstance& instance, const Plan& plan,
                                       double c0) {
  const RadialForest forest(instance, plan);
  std::vector<VulnerableNode> out;
  for (NodeId v : instance.consumers()) {
    const double x = forest.path_reactance(v);
    out.push_back({v, x, 2.0 * c0 * x});
  }
  std::sort(out.begin(), out.end(), [](const VulnerableNode& l, const VulnerableNode& r) {
    if (l.path_reactance != r.path_reactance) return l.path_reactance > r.path_reactance;
    return l.node < r.node;
  });
  return out;
}

// Compared as C0 <= y_bar / (2 x) so that the verdict flips exactly at the
// tolerable budget reported below.
bool within_bound(double c0, double max_path_reactance, double y_bar) {
  if (max_path_reactance <= 0.0) return true;
  return c0 <= y_bar / (2.0 * max_path_reactance);
}

}  // namespace

std::vector<VulnerableNode> rank_vulnerable_nodes(const PlanningInstance& instance, const Plan& plan,
                                                  std::size_t top_k, double c0) {
  auto ranked = all_ranked(instance, plan, c0);
  if (ranked.size() > top_k) ranked.resize(top_k);
  return ranked;
}

SecurityVerdict security_check(const PlanningInstance& instance, const Plan& plan, double c0,
                               double y_bar) {
  SecurityVerdict verdict;
  const auto ranked = all_ranked(instance, plan, c0);
  if (!ranked.empty()) {
    verdict.max_deviation = ranked.front().worst_case_sup;
    verdict.critical_node = ranked.front().node;
  }
  verdict.margin = y_bar - verdict.max_deviation;
  verdict.secure = within_bound(c0, ranked.empty() ? 0.0 : ranked.front().path_reactance, y_bar);
  return verdict;
}

SecurityVerdict security_check(const PlanningInstance& instance, const Plan& plan, double c0) {
  return security_check(instance, plan, c0, instance.security().y_bar());
}

TolerableAttack tolerable_attack_power(const PlanningInstance& instance, const Plan& plan) {
  const auto ranked = all_ranked(instance, plan, 1.0);
  TolerableAttack out;
  if (ranked.empty() || ranked.front().path_reactance <= 0.0) {
    out.c0_max = out.apparent_kw = out.active_kw = std::numeric_limits<double>::infinity();
    return out;
  }
  const double m = instance.rx_ratio();
  out.c0_max = instance.security().y_bar() / (2.0 * ranked.front().path_reactance);
  out.apparent_kw = original_bound(out.c0_max, m) / 1e3;
  out.active_kw = active_attack_component(out.c0_max, m) / 1e3;
  return out;
}

VulnerabilityReport assess(const PlanningInstance& instance, const Plan& plan, double c0,
                           std::size_t top_k) {
  VulnerabilityReport report;
  report.c0 = c0;
  report.y_bar = instance.security().y_bar();
  report.ranking = rank_vulnerable_nodes(instance, plan, top_k, c0);
  report.tolerable = tolerable_attack_power(instance, plan);
  report.secure_under_c0 = security_check(instance, plan, c0).secure;
  return report;
}

std::string report_to_json(const VulnerabilityReport& report) {
  nlohmann::json j;
  j["c0"] = report.c0;
  j["y_bar_v2"] = report.y_bar;
  j["secure_under_c0"] = report.secure_under_c0;
  j["tolerable"] = {{"c0_max", report.tolerable.c0_max},
                    {"apparent_kw", report.tolerable.apparent_kw},
                    {"active_kw", report.tolerable.active_kw}};
  j["ranking"] = nlohmann::json::array();
  for (const auto& r : report.ranking) {
    j["ranking"].push_back({{"node", r.node},
                            {"path_reactance_ohm", r.path_reactance},
                            {"worst_case_sup_v2", r.worst_case_sup}});
  }
  return j.dump(2) + "\n";
}

void print_report(std::ostream& out, const VulnerabilityReport& report) {
  out << "vulnerable node   path reactance [ohm]   worst-case |y| [V^2]\n";
  for (const auto& r : report.ranking) {
    out << std::setw(15) << r.node << std::setw(23) << std::fixed << std::setprecision(4)
        << r.path_reactance << std::setw(23) << std::scientific << std::setprecision(4)
        << r.worst_case_sup << '\n';
  }
  out << std::defaultfloat << std::setprecision(6);
  out << "tolerable y_bar      : " << report.y_bar << " V^2\n"
      << "attack budget C0     : " << report.c0 << '\n'
      << "secure under C0      : " << (report.secure_under_c0 ? "yes" : "no") << '\n'
      << std::fixed << std::setprecision(1)
      << "tolerable attack     : " << report.tolerable.active_kw << " kW active ("
      << report.tolerable.apparent_kw << " kVA apparent, C0 = " << std::setprecision(0)
      << report.tolerable.c0_max << ")\n"
      << std::defaultfloat;
}

std::vector<SweepRow> budget_sweep(const PlanningInstance& instance,
                                   const std::vector<LabeledPlan>& plans,
                                   const std::vector<double>& c0_grid) {
  const double y_bar = instance.security().y_bar();
  std::vector<SweepRow> rows;
  std::vector<double> max_x;
  for (const auto& p : plans) {
    const auto ranked = all_ranked(instance, p.plan, 1.0);
    max_x.push_back(ranked.empty() ? 0.0 : ranked.front().path_reactance);
  }
  for (double c0 : c0_grid) {
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const double y = 2.0 * c0 * max_x[k];
      rows.push_back({c0, plans[k].label, y, within_bound(c0, max_x[k], y_bar)});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "c0,plan,max_y,tolerable\n" << std::setprecision(12);
  for (const auto& r : rows) {
    out << r.c0 << ',' << r.label << ',' << r.max_y << ',' << (r.tolerable ? 1 : 0) << '\n';
  }
}

}  // namespace gridsec
