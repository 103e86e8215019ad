#pragma once

// Continuous-time agent models and the fixed-step integrator.
//
// Pursuers are planar Dubins vehicles (constant speed, bounded turn rate),
// the evader is a single integrator with constant speed and a freely chosen
// heading. Headings are kept unwrapped inside every state; wrap_angle() is
// only applied when values are reported.

#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "nrpursuit/errors.hpp"

namespace nrpursuit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
/// z-component of the planar cross product a x b.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

struct DubinsState {
  Vec2 pos;
  double heading = 0.0;  // rad, unwrapped

  bool finite() const { return pos.finite() && std::isfinite(heading); }
};

struct PursuerParams {
  double speed = 2.0;  // m/s
  double u_max = 1.0;  // rad/s

  double turning_radius() const { return speed / u_max; }
};

struct EvaderParams {
  double speed = 1.0;  // m/s
  Vec2 goal;
  double evade_radius_scale = 3.0;  // goal seeking beyond scale * R_P
};

struct DubinsRate {
  Vec2 dpos;
  double dheading = 0.0;
};

/// Stacked state: pursuer 1, ..., pursuer N, evader position.
struct GlobalState {
  std::vector<DubinsState> pursuers;
  Vec2 evader;

  std::size_t dimension() const { return 3 * pursuers.size() + 2; }
  Eigen::VectorXd to_vector() const;
  static GlobalState from_vector(const Eigen::VectorXd& v, std::size_t n_pursuers);
};

DubinsRate dubins_derivative(const DubinsState& s, double u, const PursuerParams& p);

Vec2 evader_derivative(double heading, const EvaderParams& e);

/// Time derivative of the stacked system, same layout as GlobalState::to_vector().
Eigen::VectorXd global_derivative(const GlobalState& x, std::span<const double> u,
                                  double evader_heading,
                                  std::span<const PursuerParams> pursuers,
                                  const EvaderParams& evader);

/// Wraps to (-pi, pi].
double wrap_angle(double a);

inline bool all_finite(double v) { return std::isfinite(v); }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

/// Classical RK4 step of dx/dt = f(x, t). Throws IntegrationError when a stage
/// or the result is not finite.
template <typename State, typename F>
State rk4_step(F&& f, const State& x, double dt, double t = 0.0) {
  if (!(dt > 0.0)) throw IntegrationError(t, "rk4_step requires dt > 0");
  auto check = [t](const auto& v, const char* what) {
    if (!all_finite(v)) throw IntegrationError(t, what);
  };
  const State k1 = f(x, t);
  check(k1, "non-finite stage k1");
  const State k2 = f(State(x + (0.5 * dt) * k1), t + 0.5 * dt);
  check(k2, "non-finite stage k2");
  const State k3 = f(State(x + (0.5 * dt) * k2), t + 0.5 * dt);
  check(k3, "non-finite stage k3");
  const State k4 = f(State(x + dt * k3), t + dt);
  check(k4, "non-finite stage k4");
  State out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  check(out, "non-finite rk4 result");
  return out;
}

}  // namespace nrpursuit
