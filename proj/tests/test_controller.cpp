#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nrpursuit/controller.hpp"
#include "oracles.hpp"

using namespace nrpursuit;
using oracle::kPi;

namespace {

OutputMap linear_map(const Eigen::MatrixXd& a) {
  return {[a](const Eigen::VectorXd& u) -> Eigen::VectorXd { return a * u; },
          [a](const Eigen::VectorXd&) -> Eigen::MatrixXd { return a; }};
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Steady-state tracking error of r(t) = v t through g(u) = u.
double ramp_error(double alpha, double v) {
  const OutputMap g = linear_map(Eigen::MatrixXd::Identity(1, 1));
  const double dt = 1e-3;
  const double horizon = 10.0 + 20.0 / alpha;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(1);
  const int n = static_cast<int>(std::lround(horizon / dt));
  for (int k = 0; k < n; ++k) {
    u = rk4_step(
        [&](const Eigen::VectorXd& x, double t) -> Eigen::VectorXd {
          return memoryless_udot(g, x, vec({v * t}), alpha);
        },
        u, dt, k * dt);
  }
  return std::abs(v * n * dt - u[0]);
}

}  // namespace

TEST_CASE("memoryless flow examples") {
  CHECK(memoryless_udot(linear_map(Eigen::MatrixXd::Identity(1, 1)), vec({0}), vec({5}), 1.0)[0] ==
        doctest::Approx(5.0));
  CHECK(memoryless_udot(linear_map(2.0 * Eigen::MatrixXd::Identity(1, 1)), vec({0}), vec({4}), 1.0)[0] ==
        doctest::Approx(2.0));
  Eigen::MatrixXd a(2, 2);
  a << 2, 0, 0, 4;
  const Eigen::VectorXd d = memoryless_udot(linear_map(a), vec({0, 0}), vec({2, 4}), 3.0);
  CHECK(d[0] == doctest::Approx(3.0));
  CHECK(d[1] == doctest::Approx(3.0));
}

TEST_CASE("singular Jacobian reports the offending input") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 2, 2, 4;
  try {
    memoryless_udot(linear_map(a), vec({0.25, -1.5}), vec({1, 1}), 1.0);
    FAIL("expected SingularityError");
  } catch (const SingularityError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0.25") != std::string::npos);
    CHECK(msg.find("-1.5") != std::string::npos);
  }
}

TEST_CASE("predictive flow uses the look-ahead reference") {
  Eigen::MatrixXd j(2, 2);
  j << 2, 0, 0, 4;
  const Eigen::VectorXd d = predictive_udot(vec({1, 2}), j, vec({3, 6}), 2.0);
  CHECK(d[0] == doctest::Approx(2.0));
  CHECK(d[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(predictive_udot(vec({1, 2}), Eigen::MatrixXd::Zero(2, 2), vec({3, 6}), 2.0),
                  SingularityError);
}

TEST_CASE("memoryless flow converges within 20/alpha seconds") {
  Eigen::MatrixXd a(2, 2);
  a << 3, 1, 1, 2;
  const OutputMap g = linear_map(a);
  const Eigen::VectorXd r = vec({1.0, -2.0});
  for (double alpha : {1.0, 5.0, 20.0}) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
    const double dt = 1e-3;
    const int n = static_cast<int>(std::lround(20.0 / alpha / dt));
    for (int k = 0; k < n; ++k) {
      u = rk4_step([&](const Eigen::VectorXd& x, double) -> Eigen::VectorXd {
        return memoryless_udot(g, x, r, alpha);
      }, u, dt);
    }
    CHECK((r - a * u).norm() < 1e-6);
  }
}

TEST_CASE("ramp tracking error approaches eta / alpha") {
  const double v = 0.7;
  for (double alpha : {1.0, 5.0, 20.0}) {
    const double bound = v / alpha;
    CHECK(std::abs(ramp_error(alpha, v) - bound) <= 0.05 * bound);
  }
}

TEST_CASE("straight-line prediction") {
  const PursuerParams p{2.0, 1.0};
  const DubinsState x{{1.0, -2.0}, 0.6};
  const double horizon = 0.8;
  const PredictionBundle b = predict_with_sensitivity(x, 0.0, horizon, p, 40);
  REQUIRE(b.size() == 41);
  CHECK(b.times.front() == 0.0);
  CHECK(b.times.back() == doctest::Approx(horizon));
  CHECK(b.xi.back().pos.x == doctest::Approx(1.0 + horizon * 2.0 * std::cos(0.6)).epsilon(1e-12));
  CHECK(b.xi.back().pos.y == doctest::Approx(-2.0 + horizon * 2.0 * std::sin(0.6)).epsilon(1e-12));
  CHECK(b.dxi_du.back()[2] == doctest::Approx(horizon).epsilon(1e-14));
  for (std::size_t k = 0; k < b.size(); ++k) {
    CHECK(b.dxi_du[k][2] == doctest::Approx(b.times[k]).epsilon(1e-12));
  }
}

TEST_CASE("sensitivity starts at zero") {
  const PursuerParams p{2.0, kPi};
  for (double u : {-2.0, 0.0, 0.3, 3.0}) {
    const PredictionBundle b = predict_with_sensitivity({{3, 4}, 1.0}, u, 0.5, p, 10, 7.0);
    CHECK(b.times.front() == 7.0);
    CHECK(b.dxi_du.front() == Eigen::Vector3d::Zero());
  }
}

TEST_CASE("position sensitivity matches a central difference at u = 0.3") {
  const PursuerParams p{2.0, kPi};
  const DubinsState x{{0.0, 0.0}, 0.2};
  const int n = 50;
  const double du = 1e-5;
  const PredictionBundle b = predict_with_sensitivity(x, 0.3, 1.0, p, n);
  const PredictionBundle hi = predict_with_sensitivity(x, 0.3 + du, 1.0, p, n);
  const PredictionBundle lo = predict_with_sensitivity(x, 0.3 - du, 1.0, p, n);
  for (std::size_t k = 0; k < b.size(); ++k) {
    CHECK(std::abs(b.dxi_du[k][0] - (hi.xi[k].pos.x - lo.xi[k].pos.x) / (2 * du)) <= 1e-6);
    CHECK(std::abs(b.dxi_du[k][1] - (hi.xi[k].pos.y - lo.xi[k].pos.y) / (2 * du)) <= 1e-6);
  }
}

TEST_CASE("sensitivity matches finite differences on random cases") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pos(-10, 10), ang(-kPi, kPi), rate(-2 * kPi, 2 * kPi),
      horizon(0.05, 2.0), speed(0.5, 3.0);
  const double du = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const PursuerParams p{speed(rng), 2 * kPi};
    const DubinsState x{{pos(rng), pos(rng)}, ang(rng)};
    const double u = rate(rng);
    const double T = horizon(rng);
    const int n = 50;
    const PredictionBundle b = predict_with_sensitivity(x, u, T, p, n);
    const PredictionBundle hi = predict_with_sensitivity(x, u + du, T, p, n);
    const PredictionBundle lo = predict_with_sensitivity(x, u - du, T, p, n);
    for (std::size_t k = 1; k < b.size(); ++k) {
      const Eigen::Vector3d fd((hi.xi[k].pos.x - lo.xi[k].pos.x) / (2 * du),
                               (hi.xi[k].pos.y - lo.xi[k].pos.y) / (2 * du),
                               (hi.xi[k].heading - lo.xi[k].heading) / (2 * du));
      const double magnitude = std::max({std::abs(b.xi[k].pos.x), std::abs(b.xi[k].pos.y),
                                         std::abs(b.xi[k].heading)});
      const double res = oracle::fd_resolution(magnitude, du);
      for (int c = 0; c < 3; ++c) {
        worst = std::max(worst, oracle::fd_mismatch(b.dxi_du[k][c], fd[c], res));
      }
    }
    // Closed-form arc derivative at the end of the window.
    const Eigen::Vector3d exact = oracle::dubins_arc_du(x, p.speed, u, T);
    CHECK((b.dxi_du.back() - exact).norm() <= 1e-6 * (1.0 + exact.norm()));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("prediction rejects bad input") {
  const PursuerParams p;
  CHECK_THROWS_AS(predict_with_sensitivity({{0, 0}, 0}, 0.1, 0.0, p, 10), ConfigError);
  CHECK_THROWS_AS(predict_with_sensitivity({{NAN, 0}, 0}, 0.1, 1.0, p, 10), IntegrationError);
}

TEST_CASE("scalar objective flow examples") {
  ControllerConfig cfg;
  CHECK(scalar_objective_udot(4.0, 2.0, 1.0, cfg) == doctest::Approx(-2.0));
  CHECK(scalar_objective_udot(0.0, 2.0, 1.0, cfg) == 0.0);
  CHECK(scalar_objective_udot(0.0, 0.0, 5.0, cfg) == 0.0);
  CHECK(scalar_objective_udot(0.0, -1e-20, 5.0, cfg) == 0.0);
  cfg.jac_epsilon = 1e-3;
  CHECK(scalar_objective_udot(1.0, 1e-12, 1.0, cfg) == doctest::Approx(-1000.0));
  CHECK(scalar_objective_udot(1.0, 0.0, 1.0, cfg) == doctest::Approx(-1000.0));
  CHECK(scalar_objective_udot(1.0, -1e-12, 1.0, cfg) == doctest::Approx(1000.0));
}

TEST_CASE("scalar objective flow descends") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> gv(-100, 100), slope(-50, 50), gain(0.1, 50);
  ControllerConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const double g = gv(rng);
    const double dg = cfg.jac_epsilon + std::abs(slope(rng));
    CHECK(g * scalar_objective_udot(g, dg, gain(rng), cfg) <= 0.0);
    // Whatever the slope sign, the predicted first-order change of g opposes g.
    const double s = slope(rng);
    CHECK(g * s * scalar_objective_udot(g, s, gain(rng), cfg) <= 0.0);
  }
}

TEST_CASE("saturation") {
  CHECK(saturate(3.0, kPi / 2) == kPi / 2);
  CHECK(saturate(-0.1, kPi / 2) == -0.1);
  CHECK(saturate(-10.0, 2 * kPi) == -2 * kPi);
  for (double u : {-7.0, -1.0, 0.0, 0.5, 1.6, 100.0}) {
    CHECK(saturate(saturate(u, kPi / 2), kPi / 2) == saturate(u, kPi / 2));
  }
}

TEST_CASE("controller config validation names the field") {
  ControllerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.horizon = -1;
  try {
    cfg.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "controller.horizon");
  }
  cfg = {};
  cfg.prediction_substeps = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
