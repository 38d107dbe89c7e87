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

#include "gridsec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace gridsec {

std::size_t ReactanceMatrix::index_of(NodeId node) const {
  auto it = std::find(node_order.begin(), node_order.end(), node);
  if (it == node_order.end()) {
    throw DynamicsError("node " + std::to_string(node) + " is not in the subtree of substation " +
                        std::to_string(substation));
  }
  return static_cast<std::size_t>(it - node_order.begin());
}

ReactanceMatrix build_reactance_matrix(const PlanningInstance& instance, const Plan& plan,
                                       NodeId substation) {
  if (!instance.has_node(substation) || !instance.is_substation(substation)) {
    throw DynamicsError("node " + std::to_string(substation) + " is not a substation");
  }
  const RadialForest forest(instance, plan);
  ReactanceMatrix out;
  out.substation = substation;
  out.node_order = forest.subtree_consumers(substation);
  std::sort(out.node_order.begin(), out.node_order.end());
  const std::size_t n = out.node_order.size();
  if (n == 0) throw DynamicsError("substation " + std::to_string(substation) + " feeds no consumer");

  std::vector<std::vector<Arc>> paths;
  paths.reserve(n);
  for (NodeId v : out.node_order) paths.push_back(forest.path(v));
  out.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      // Root-to-leaf paths in a tree share a common prefix.
      double shared = 0.0;
      for (std::size_t k = 0; k < std::min(paths[i].size(), paths[j].size()); ++k) {
        if (paths[i][k] != paths[j][k]) break;
        shared += instance.edge_of(paths[i][k]).reactance_ohm();
      }
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      out.x(ii, jj) = out.x(jj, ii) = 2.0 * shared;
    }
  }
  return out;
}

double surrogate_bound(double c, double m) { return c * std::sqrt(m * m + 1.0); }

double original_bound(double c0, double m) { return c0 / std::sqrt(m * m + 1.0); }

double surrogate_signal(double a_p, double a_q, double m) { return m * a_p + a_q; }

double active_attack_component(double c0, double m) { return m * c0 / (m * m + 1.0); }

double PiecewiseSignal::at(double t) const {
  double level = 0.0;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    if (t >= breakpoints[k]) level = levels[k];
  }
  return level;
}

double PiecewiseSignal::sup_abs() const {
  double out = 0.0;
  for (double l : levels) out = std::max(out, std::abs(l));
  return out;
}

PiecewiseSignal worst_signal(const AttackScenario& scenario) {
  const double high = scenario.sign * scenario.c0;
  if (scenario.flip_time <= 0.0) return PiecewiseSignal{{0.0}, {high}};
  return PiecewiseSignal{{0.0, scenario.flip_time}, {-high, high}};
}

GridDynamics::GridDynamics(ReactanceMatrix reactance, Eigen::VectorXd gains, double rx_ratio)
    : reactance_(std::move(reactance)), gains_(std::move(gains)), rx_ratio_(rx_ratio) {
  const auto n = reactance_.x.rows();
  if (reactance_.x.cols() != n || gains_.size() != n) {
    throw DynamicsError("reactance matrix and gain vector sizes disagree");
  }
  if ((gains_.array() <= 0.0).any()) throw DynamicsError("integral gains must be positive");
  s_ = 0.5 * reactance_.x;
  const Eigen::VectorXd root_k = gains_.array().sqrt();
  const Eigen::MatrixXd a = root_k.asDiagonal() * s_ * root_k.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw DynamicsError("eigendecomposition failed");
  lambda_ = eig.eigenvalues();
  v_ = eig.eigenvectors();
  if (lambda_.minCoeff() <= 0.0) throw DynamicsError("A is not positive definite");
}

GridDynamics GridDynamics::from_plan(const PlanningInstance& instance, const Plan& plan,
                                     NodeId substation) {
  ReactanceMatrix x = build_reactance_matrix(instance, plan, substation);
  Eigen::VectorXd gains(static_cast<Eigen::Index>(x.size()));
  for (std::size_t k = 0; k < x.size(); ++k) {
    gains(static_cast<Eigen::Index>(k)) = instance.gain_of(x.node_order[k]);
  }
  return GridDynamics(std::move(x), std::move(gains), instance.rx_ratio());
}

GridDynamics GridDynamics::for_target(const PlanningInstance& instance, const Plan& plan,
                                      NodeId target) {
  if (!instance.has_node(target) || instance.is_substation(target)) {
    throw DynamicsError("target " + std::to_string(target) + " is not a consumer");
  }
  const RadialForest forest(instance, plan);
  return from_plan(instance, plan, forest.root_of(target));
}

Eigen::MatrixXd GridDynamics::a() const {
  const Eigen::VectorXd root_k = gains_.array().sqrt();
  return root_k.asDiagonal() * s_ * root_k.asDiagonal();
}

Eigen::MatrixXd GridDynamics::b() const {
  const Eigen::VectorXd root_k = gains_.array().sqrt();
  return root_k.asDiagonal() * s_;
}

Eigen::VectorXd GridDynamics::modal_input(std::size_t target) const {
  const auto i = static_cast<Eigen::Index>(target);
  // B e_i = K^{1/2} S e_i
  return v_.transpose() * (gains_.array().sqrt().matrix().cwiseProduct(s_.col(i)));
}

Response simulate_signal(const GridDynamics& dynamics, NodeId target,
                         const PiecewiseSignal& signal, double horizon, double dt) {
  if (!(dt > 0.0)) throw DynamicsError("time step must be positive");
  const std::size_t i = dynamics.reactance().index_of(target);
  const Eigen::VectorXd c = dynamics.modal_input(i);
  const Eigen::VectorXd& lambda = dynamics.eigenvalues();
  const double s_ii = dynamics.sensitivity()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(lambda.size());

  Response out;
  auto record = [&](double t, double a) {
    const double y = c.dot(w) + s_ii * a;
    out.samples.push_back({t, a, y});
    out.peak_abs_y = std::max(out.peak_abs_y, std::abs(y));
  };
  auto advance = [&](double h, double a) {
    if (h <= 0.0) return;
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
      const double decay = std::exp(-lambda(k) * h);
      const double gain = -std::expm1(-lambda(k) * h) / lambda(k);
      w(k) = decay * w(k) - gain * c(k) * a;
    }
  };

  std::vector<double> events;
  for (double b : signal.breakpoints) {
    if (b > 0.0 && b <= horizon) events.push_back(b);
  }
  std::sort(events.begin(), events.end());
  std::size_t next_event = 0;
  double t = 0.0;
  double level = signal.at(0.0);
  record(0.0, level);
  const auto steps = static_cast<long>(std::ceil(horizon / dt - 1e-9));
  for (long step = 1; step <= steps; ++step) {
    const double t_next = std::min(horizon, static_cast<double>(step) * dt);
    while (next_event < events.size() && events[next_event] <= t_next) {
      const double te = events[next_event++];
      advance(te - t, level);
      t = te;
      record(t, level);  // left limit
      level = signal.at(t);
      record(t, level);
    }
    if (t_next > t) {
      advance(t_next - t, level);
      t = t_next;
      record(t, level);
    }
  }
  return out;
}

Response simulate_response(const GridDynamics& dynamics, const AttackScenario& scenario,
                           double dt) {
  if (scenario.flip_time > scenario.horizon) {
    throw DynamicsError("flip time lies beyond the horizon");
  }
  Response r = simulate_signal(dynamics, scenario.target, worst_signal(scenario), scenario.horizon, dt);
  for (const auto& s : r.samples) {
    if (s.t == scenario.flip_time) r.at_flip = std::abs(s.y);  // last sample at t is post-flip
  }
  return r;
}

double y_max_closed_form(const GridDynamics& dynamics, NodeId target, double c0, double t) {
  const std::size_t i = dynamics.reactance().index_of(target);
  const auto ii = static_cast<Eigen::Index>(i);
  const Eigen::VectorXd c = dynamics.modal_input(i);
  const Eigen::VectorXd& lambda = dynamics.eigenvalues();
  const double inv_root_k = 1.0 / std::sqrt(dynamics.gains()(ii));
  double transient = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    transient += inv_root_k * dynamics.eigenvectors()(ii, k) * std::exp(-lambda(k) * t) * c(k);
  }
  return 2.0 * dynamics.sensitivity()(ii, ii) * c0 - transient * c0;
}

double worst_case_sup(const PlanningInstance& instance, const Plan& plan, NodeId target,
                      double c0) {
  if (!instance.has_node(target) || instance.is_substation(target)) {
    throw DynamicsError("target " + std::to_string(target) + " is not a consumer");
  }
  return 2.0 * c0 * RadialForest(instance, plan).path_reactance(target);
}

double worst_case_sup(const PlanningInstance& instance, const Plan& plan, NodeId target) {
  return worst_case_sup(instance, plan, target, instance.security().attack_budget_c0);
}

void write_response_csv(std::ostream& out, const Response& response, double u_rated) {
  out << "t_s,a_hat,y_V2,v_kV\n" << std::setprecision(12);
  for (const auto& s : response.samples) {
    out << s.t << ',' << s.a_hat << ',' << s.y << ',' << std::sqrt(std::max(u_rated + s.y, 0.0)) / 1e3
        << '\n';
  }
}

}  // namespace gridsec
