#include "nrpursuit/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace nrpursuit {

void ControllerConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("controller.alpha", "must be > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("controller.horizon", "must be > 0");
  }
  if (!(jac_epsilon > 0.0) || !std::isfinite(jac_epsilon)) {
    throw ConfigError("controller.jac_epsilon", "must be > 0");
  }
  if (prediction_substeps < 2) {
    throw ConfigError("controller.prediction_substeps", "must be >= 2");
  }
}

Eigen::VectorXd predictive_udot(const Eigen::VectorXd& predicted, const Eigen::MatrixXd& jacobian,
                                const Eigen::VectorXd& r_ahead, double alpha,
                                double max_condition) {
  const Eigen::Index m = predicted.size();
  if (r_ahead.size() != m || jacobian.rows() != m || jacobian.cols() != m) {
    throw ConfigError("jacobian", "output, reference and Jacobian dimensions disagree");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  const double smin = s.size() ? s[s.size() - 1] : 0.0;
  if (!(smin > 0.0) || smax / smin > max_condition) {
    std::ostringstream msg;
    msg << "singular Jacobian (sigma_min=" << smin << ", sigma_max=" << smax << ")";
    throw SingularityError(msg.str());
  }
  return alpha * svd.solve(r_ahead - predicted);
}

Eigen::VectorXd memoryless_udot(const OutputMap& g, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& r, double alpha, double max_condition) {
  try {
    return predictive_udot(g.value(u), g.jacobian(u), r, alpha, max_condition);
  } catch (const SingularityError& e) {
    std::ostringstream msg;
    msg << e.what() << " at u = [" << u.transpose() << "]";
    throw SingularityError(msg.str());
  }
}

namespace {

using Joint = Eigen::Matrix<double, 6, 1>;  // (x, y, heading, dx/du, dy/du, dheading/du)

Joint joint_rhs(const Joint& z, double u, double speed) {
  const double c = std::cos(z[2]);
  const double s = std::sin(z[2]);
  Joint dz;
  dz[0] = speed * c;
  dz[1] = speed * s;
  dz[2] = u;
  // df/dxi * S + df/du, with df/dxi = [[0,0,-V s],[0,0,V c],[0,0,0]], df/du = (0,0,1).
  dz[3] = -speed * s * z[5];
  dz[4] = speed * c * z[5];
  dz[5] = 1.0;
  return dz;
}

}  // namespace

PredictionBundle predict_with_sensitivity(const DubinsState& x, double u_held, double horizon,
                                          const PursuerParams& p, int substeps, double t0) {
  if (!(horizon > 0.0)) throw ConfigError("horizon", "must be > 0");
  if (substeps < 1) throw ConfigError("prediction_substeps", "must be >= 1");
  if (!x.finite() || !std::isfinite(u_held)) {
    throw IntegrationError(t0, "non-finite prediction input");
  }

  const double h = horizon / substeps;
  PredictionBundle b;
  b.times.reserve(substeps + 1);
  b.xi.reserve(substeps + 1);
  b.dxi_du.reserve(substeps + 1);

  Joint z;
  z << x.pos.x, x.pos.y, x.heading, 0.0, 0.0, 0.0;
  auto push = [&b](const Joint& v, double t) {
    b.times.push_back(t);
    b.xi.push_back({{v[0], v[1]}, v[2]});
    b.dxi_du.emplace_back(v[3], v[4], v[5]);
  };
  push(z, t0);
  auto rhs = [&](const Joint& v, double) { return joint_rhs(v, u_held, p.speed); };
  for (int k = 0; k < substeps; ++k) {
    const double t = t0 + k * h;
    z = rk4_step(rhs, z, h, t);
    push(z, t0 + (k + 1) * h);
  }
  return b;
}

double regularize_derivative(double dg_du, double jac_epsilon) {
  const double sign = dg_du < 0.0 ? -1.0 : 1.0;
  return sign * std::max(std::abs(dg_du), jac_epsilon);
}

double scalar_objective_udot(double gval, double dg_du, double alpha,
                             const ControllerConfig& cfg) {
  if (gval == 0.0) return 0.0;
  return -alpha * gval / regularize_derivative(dg_du, cfg.jac_epsilon);
}

double saturate(double u, double u_max) { return std::clamp(u, -u_max, u_max); }

}  // namespace nrpursuit
