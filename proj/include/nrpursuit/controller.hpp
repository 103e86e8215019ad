#pragma once

// Newton-Raphson flow tracking controllers.
//
// The controller state u is driven by u' = alpha * (dg/du)^-1 (r - g(u)), where
// g maps the input to the (predicted) output. For a Dubins pursuer the output
// is two-dimensional while the input is a scalar turn rate, so the pursuit
// controllers run the flow on a scalar objective instead; see
// scalar_objective_udot().

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "nrpursuit/dynamics.hpp"

namespace nrpursuit {

struct ControllerConfig {
  double alpha = 20.0;
  double horizon = 0.2;  // look-ahead T, s
  double jac_epsilon = 1e-4;
  int prediction_substeps = 50;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Constant-input prediction of a single pursuer over [t0, t0 + T] together
/// with the sensitivity of the predicted state to the held input.
struct PredictionBundle {
  std::vector<double> times;
  std::vector<DubinsState> xi;
  std::vector<Eigen::Vector3d> dxi_du;  // d(x, y, heading)/du

  std::size_t size() const { return times.size(); }
  Vec2 position(std::size_t k) const { return xi[k].pos; }
  Vec2 position_sensitivity(std::size_t k) const { return {dxi_du[k][0], dxi_du[k][1]}; }
};

/// Memoryless plant y = g(u) with its Jacobian.
struct OutputMap {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

/// alpha * J^-1 (r_ahead - predicted). Throws SingularityError when J is
/// singular or its condition number exceeds max_condition.
Eigen::VectorXd predictive_udot(const Eigen::VectorXd& predicted, const Eigen::MatrixXd& jacobian,
                                const Eigen::VectorXd& r_ahead, double alpha,
                                double max_condition = 1e12);

/// Newton-Raphson flow for a memoryless plant: alpha * (dg/du)^-1 (r - g(u)).
Eigen::VectorXd memoryless_udot(const OutputMap& g, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& r, double alpha,
                                double max_condition = 1e12);

/// Integrates the pursuer model and its sensitivity ODE jointly with RK4 on
/// `substeps` equal steps; the sensitivity starts at zero.
PredictionBundle predict_with_sensitivity(const DubinsState& x, double u_held, double horizon,
                                          const PursuerParams& p, int substeps, double t0 = 0.0);

/// sign(z) * max(|z|, eps), with sign(0) = +1.
double regularize_derivative(double dg_du, double jac_epsilon);

/// Flow toward g = 0 for a scalar objective: -alpha * g / reg(dg/du).
double scalar_objective_udot(double gval, double dg_du, double alpha,
                             const ControllerConfig& cfg);

double saturate(double u, double u_max);

}  // namespace nrpursuit
