#include "nrpursuit/dynamics.hpp"

#include <numbers>
#include <string>

namespace nrpursuit {

ConfigError::ConfigError(const std::string& field, const std::string& what, int line)
    : std::runtime_error(line >= 0 ? field + " (line " + std::to_string(line) + "): " + what
                                   : field + ": " + what),
      field_(field),
      line_(line) {}

IntegrationError::IntegrationError(double t, const std::string& what)
    : std::runtime_error("integration failed at t=" + std::to_string(t) + ": " + what), t_(t) {}

Eigen::VectorXd GlobalState::to_vector() const {
  Eigen::VectorXd v(dimension());
  Eigen::Index k = 0;
  for (const auto& p : pursuers) {
    v[k++] = p.pos.x;
    v[k++] = p.pos.y;
    v[k++] = p.heading;
  }
  v[k++] = evader.x;
  v[k] = evader.y;
  return v;
}

GlobalState GlobalState::from_vector(const Eigen::VectorXd& v, std::size_t n_pursuers) {
  if (static_cast<std::size_t>(v.size()) != 3 * n_pursuers + 2) {
    throw ConfigError("state", "vector length " + std::to_string(v.size()) +
                                   " does not match " + std::to_string(n_pursuers) +
                                   " pursuers");
  }
  GlobalState s;
  s.pursuers.resize(n_pursuers);
  Eigen::Index k = 0;
  for (auto& p : s.pursuers) {
    p.pos.x = v[k++];
    p.pos.y = v[k++];
    p.heading = v[k++];
  }
  s.evader = {v[k], v[k + 1]};
  return s;
}

DubinsRate dubins_derivative(const DubinsState& s, double u, const PursuerParams& p) {
  if (!s.finite() || !std::isfinite(u)) {
    throw DomainError("dubins_derivative: non-finite state or input");
  }
  return {{p.speed * std::cos(s.heading), p.speed * std::sin(s.heading)}, u};
}

Vec2 evader_derivative(double heading, const EvaderParams& e) {
  if (!std::isfinite(heading)) throw DomainError("evader_derivative: non-finite heading");
  return {e.speed * std::cos(heading), e.speed * std::sin(heading)};
}

Eigen::VectorXd global_derivative(const GlobalState& x, std::span<const double> u,
                                  double evader_heading,
                                  std::span<const PursuerParams> pursuers,
                                  const EvaderParams& evader) {
  const std::size_t n = x.pursuers.size();
  if (u.size() != n) {
    throw ConfigError("u", "expected " + std::to_string(n) + " inputs, got " +
                               std::to_string(u.size()));
  }
  if (pursuers.size() != n) {
    throw ConfigError("pursuers", "expected " + std::to_string(n) + " parameter sets, got " +
                                      std::to_string(pursuers.size()));
  }
  if (!x.evader.finite()) throw DomainError("global_derivative: non-finite evader position");

  Eigen::VectorXd dx(x.dimension());
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const DubinsRate r = dubins_derivative(x.pursuers[i], u[i], pursuers[i]);
    dx[k++] = r.dpos.x;
    dx[k++] = r.dpos.y;
    dx[k++] = r.dheading;
  }
  const Vec2 ve = evader_derivative(evader_heading, evader);
  dx[k++] = ve.x;
  dx[k] = ve.y;
  return dx;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(a, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

}  // namespace nrpursuit
