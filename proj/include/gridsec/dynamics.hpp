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

#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gridsec/grid_model.hpp"

namespace gridsec {

/// Symmetric N x N matrix over the consumers of one subtree:
/// entry (i, j) is twice the reactance shared by the substation-to-i and
/// substation-to-j paths (ohm).
struct ReactanceMatrix {
  Eigen::MatrixXd x;
  std::vector<NodeId> node_order;
  NodeId substation = 0;

  std::size_t index_of(NodeId node) const;
  std::size_t size() const { return node_order.size(); }
};

ReactanceMatrix build_reactance_matrix(const PlanningInstance& instance, const Plan& plan,
                                       NodeId substation);

/// Conversions between the apparent-power budget C and the
/// surrogate bound C0 = C sqrt(m^2 + 1).
double surrogate_bound(double c, double m);
double original_bound(double c0, double m);
/// Surrogate input m a_p + a_q of an original (active, reactive) attack.
double surrogate_signal(double a_p, double a_q, double m);
/// Active-power part m C0 / (m^2 + 1) of the worst-aligned original attack.
double active_attack_component(double c0, double m);

/// Right-continuous piecewise-constant signal: levels[k] holds on
/// [breakpoints[k], breakpoints[k+1]).
struct PiecewiseSignal {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  double at(double t) const;
  double sup_abs() const;
};

struct AttackScenario {
  NodeId target = 0;
  double c0 = 0.0;
  double flip_time = 0.0;
  double horizon = 0.0;
  int sign = +1;
};

/// Bang-bang signal: -sign*C0 on [0, t), +sign*C0 from t on.
PiecewiseSignal worst_signal(const AttackScenario& scenario);

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-loop inverter/grid dynamics of one subtree in symmetric coordinates:
///   z' = -A z - B e_i a,   y = S K^{1/2} z + S e_i a,
/// with A = K^{1/2} S K^{1/2}, B = K^{1/2} S and S the shared-path
/// reactance matrix (half of ReactanceMatrix::x). A is diagonalized once.
class GridDynamics {
 public:
  GridDynamics(ReactanceMatrix reactance, Eigen::VectorXd gains, double rx_ratio);

  static GridDynamics from_plan(const PlanningInstance& instance, const Plan& plan,
                                NodeId substation);
  /// Dynamics of the subtree that feeds `target`.
  static GridDynamics for_target(const PlanningInstance& instance, const Plan& plan, NodeId target);

  const ReactanceMatrix& reactance() const { return reactance_; }
  const Eigen::MatrixXd& sensitivity() const { return s_; }
  const Eigen::VectorXd& gains() const { return gains_; }
  double rx_ratio() const { return rx_ratio_; }
  Eigen::MatrixXd a() const;
  Eigen::MatrixXd b() const;
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return v_; }
  /// 1 / smallest eigenvalue of A, seconds.
  double dominant_time_constant() const { return 1.0 / lambda_.minCoeff(); }

  /// Modal coupling c = V^T B e_i for a target index.
  Eigen::VectorXd modal_input(std::size_t target) const;

 private:
  ReactanceMatrix reactance_;
  Eigen::MatrixXd s_;
  Eigen::VectorXd gains_;
  double rx_ratio_;
  Eigen::VectorXd lambda_;
  Eigen::MatrixXd v_;
};

struct ResponseSample {
  double t = 0.0;
  double a_hat = 0.0;
  double y = 0.0;
};

struct Response {
  std::vector<ResponseSample> samples;
  double peak_abs_y = 0.0;
  /// |y| at the flip instant with the post-flip input (worst-signal runs only).
  double at_flip = 0.0;
};

/// Exact modal stepping for a piecewise-constant input applied at `target`.
/// Samples every dt plus both sides of each breakpoint.
Response simulate_signal(const GridDynamics& dynamics, NodeId target,
                         const PiecewiseSignal& signal, double horizon, double dt);

/// Worst-signal run for a scenario.
Response simulate_response(const GridDynamics& dynamics, const AttackScenario& scenario,
                           double dt);

/// 2 e_i^T S e_i C0 - e_i^T K^{-1/2} e^{-A t} B e_i C0.
double y_max_closed_form(const GridDynamics& dynamics, NodeId target, double c0, double t);

/// 2 C0 times the path reactance of `target`, V^2 (the t -> infinity limit).
double worst_case_sup(const PlanningInstance& instance, const Plan& plan, NodeId target,
                      double c0);
double worst_case_sup(const PlanningInstance& instance, const Plan& plan, NodeId target);

/// CSV columns t_s, a_hat, y_V2, v_kV.
void write_response_csv(std::ostream& out, const Response& response, double u_rated);

}  // namespace gridsec
