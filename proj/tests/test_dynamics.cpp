#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>

#include "nrpursuit/dynamics.hpp"
#include "oracles.hpp"

using namespace nrpursuit;
using oracle::kPi;

namespace {

// Scalar wrapper so rk4_step can run on plain doubles.
double rk4_scalar(double (*f)(double), double x, double dt) {
  return rk4_step([f](double v, double) { return f(v); }, x, dt);
}

double rk4_decay_error(double dt, double horizon) {
  double x = 1.0;
  const int n = static_cast<int>(std::lround(horizon / dt));
  for (int i = 0; i < n; ++i) x = rk4_scalar([](double v) { return -v; }, x, dt);
  return std::abs(x - std::exp(-horizon));
}

Eigen::Vector3d dubins_field(const Eigen::Vector3d& s, double u, const PursuerParams& p) {
  const DubinsRate r = dubins_derivative({{s[0], s[1]}, s[2]}, u, p);
  return {r.dpos.x, r.dpos.y, r.dheading};
}

}  // namespace

TEST_CASE("dubins derivative examples") {
  const PursuerParams p{2.0, 1.0};
  auto r = dubins_derivative({{0, 0}, 0.0}, 0.0, p);
  CHECK(r.dpos.x == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.dpos.y == doctest::Approx(0.0));
  CHECK(r.dheading == 0.0);

  r = dubins_derivative({{0, 0}, kPi / 2}, 1.0, p);
  CHECK(std::abs(r.dpos.x) < 1e-15);
  CHECK(r.dpos.y == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.dheading == 1.0);

  r = dubins_derivative({{5, -3}, kPi / 4}, 0.5, p);
  CHECK(r.dpos.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r.dpos.y == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r.dheading == 0.5);
}

TEST_CASE("dubins derivative rejects non-finite state") {
  const PursuerParams p;
  CHECK_THROWS_AS(dubins_derivative({{NAN, 0}, 0}, 0, p), DomainError);
  CHECK_THROWS_AS(dubins_derivative({{0, 0}, INFINITY}, 0, p), DomainError);
}

TEST_CASE("evader derivative examples") {
  EvaderParams e;
  e.speed = 1.0;
  auto v = evader_derivative(0.0, e);
  CHECK(v.x == 1.0);
  CHECK(v.y == 0.0);

  e.speed = 1.5;
  v = evader_derivative(kPi, e);
  CHECK(v.x == doctest::Approx(-1.5));
  CHECK(std::abs(v.y) < 1e-15);

  e.speed = 1.0;
  v = evader_derivative(kPi / 3, e);
  CHECK(v.x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(v.y == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));

  CHECK_THROWS_AS(evader_derivative(NAN, e), DomainError);
}

TEST_CASE("global derivative stacks agents in order") {
  GlobalState x;
  x.pursuers = {{{0, 0}, 0.0}, {{1, 1}, 0.0}};
  x.evader = {4, 4};
  const std::array<double, 2> u{0.0, 0.0};
  const std::array<PursuerParams, 2> params{PursuerParams{2.0, 1.0}, PursuerParams{2.0, 1.0}};
  EvaderParams e;
  e.speed = 1.0;
  const Eigen::VectorXd d = global_derivative(x, u, 0.0, params, e);
  Eigen::VectorXd expected(8);
  expected << 2, 0, 0, 2, 0, 0, 1, 0;
  CHECK(d == expected);
}

TEST_CASE("global derivative with one pursuer is the two models concatenated") {
  GlobalState x;
  x.pursuers = {{{3, -2}, 0.7}};
  x.evader = {-1, 5};
  const std::array<double, 1> u{0.4};
  const std::array<PursuerParams, 1> params{PursuerParams{2.0, 1.5}};
  EvaderParams e;
  e.speed = 0.8;
  const Eigen::VectorXd d = global_derivative(x, u, -2.1, params, e);
  const DubinsRate r = dubins_derivative(x.pursuers[0], 0.4, params[0]);
  const Vec2 ev = evader_derivative(-2.1, e);
  REQUIRE(d.size() == 5);
  CHECK(d[0] == r.dpos.x);
  CHECK(d[1] == r.dpos.y);
  CHECK(d[2] == r.dheading);
  CHECK(d[3] == ev.x);
  CHECK(d[4] == ev.y);
}

TEST_CASE("global derivative matches per-component assembly on random states") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-50, 50), ang(-10, 10), spd(0.5, 3), rate(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 4;
    GlobalState x;
    std::vector<double> u;
    std::vector<PursuerParams> params;
    for (std::size_t i = 0; i < n; ++i) {
      x.pursuers.push_back({{pos(rng), pos(rng)}, ang(rng)});
      u.push_back(rate(rng));
      params.push_back({spd(rng), 2.0});
    }
    x.evader = {pos(rng), pos(rng)};
    EvaderParams e;
    e.speed = spd(rng);
    const double he = ang(rng);
    const Eigen::VectorXd d = global_derivative(x, u, he, params, e);
    REQUIRE(static_cast<std::size_t>(d.size()) == 3 * n + 2);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(d[3 * i] == params[i].speed * std::cos(x.pursuers[i].heading));
      CHECK(d[3 * i + 1] == params[i].speed * std::sin(x.pursuers[i].heading));
      CHECK(d[3 * i + 2] == u[i]);
    }
    CHECK(d[3 * n] == e.speed * std::cos(he));
    CHECK(d[3 * n + 1] == e.speed * std::sin(he));

    const Eigen::VectorXd again = global_derivative(x, u, he, params, e);
    CHECK(std::memcmp(d.data(), again.data(), sizeof(double) * d.size()) == 0);
  }
}

TEST_CASE("global derivative rejects an input count mismatch") {
  GlobalState x;
  x.pursuers = {{{0, 0}, 0.0}, {{1, 1}, 0.0}};
  const std::array<double, 1> u{0.0};
  const std::array<PursuerParams, 2> params{};
  CHECK_THROWS_AS(global_derivative(x, u, 0.0, params, EvaderParams{}), ConfigError);
}

TEST_CASE("state vector round trip") {
  GlobalState x;
  x.pursuers = {{{1, 2}, 3}, {{4, 5}, 6}};
  x.evader = {7, 8};
  const Eigen::VectorXd v = x.to_vector();
  const GlobalState y = GlobalState::from_vector(v, 2);
  CHECK(y.to_vector() == v);
  CHECK_THROWS_AS(GlobalState::from_vector(v, 3), ConfigError);
}

TEST_CASE("rk4 examples") {
  CHECK(std::abs(rk4_scalar([](double v) { return -v; }, 1.0, 0.1) - 0.90483742) < 1e-7);
  CHECK(rk4_scalar([](double) { return 0.0; }, 3.25, 0.1) == 3.25);
  CHECK(rk4_scalar([](double) { return 1.0; }, 0.0, 0.5) == 0.5);
}

TEST_CASE("rk4 is fourth order") {
  const double e1 = rk4_decay_error(0.1, 2.0);
  const double e2 = rk4_decay_error(0.05, 2.0);
  const double ratio = e1 / e2;
  CHECK(ratio >= 14.0);
  CHECK(ratio <= 18.0);
}

TEST_CASE("rk4 reports non-finite stages with the time stamp") {
  auto blow_up = [](double v, double) { return v > 1.5 ? NAN : 1.0; };
  try {
    rk4_step(blow_up, 1.0, 1.0, 4.5);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time() == 4.5);
  }
  CHECK_THROWS_AS(rk4_step(blow_up, 0.0, 0.0), IntegrationError);
  CHECK_THROWS_AS(rk4_step(blow_up, 0.0, -0.1), IntegrationError);
}

TEST_CASE("dubins speed is invariant along a trajectory") {
  const PursuerParams p{2.0, kPi / 2};
  Eigen::Vector3d s(0.0, 0.0, 0.3);
  for (int k = 0; k < 1000; ++k) {
    const double u = p.u_max * std::sin(0.01 * k);
    const Eigen::Vector3d d = dubins_field(s, u, p);
    CHECK(std::hypot(d[0], d[1]) == doctest::Approx(p.speed).epsilon(1e-15));
    s = rk4_step([&](const Eigen::Vector3d& v, double) -> Eigen::Vector3d { return dubins_field(v, u, p); },
                 s, 0.01);
  }
}

TEST_CASE("constant-input dubins propagation follows the closed-form arc") {
  for (double u : {0.3, -1.2, kPi / 2, 2 * kPi}) {
    const PursuerParams p{2.0, 2 * kPi};
    const DubinsState s0{{1.5, -4.0}, 0.8};
    Eigen::Vector3d s(s0.pos.x, s0.pos.y, s0.heading);
    const double dt = 1e-3;
    for (int k = 0; k < 1000; ++k) {
      s = rk4_step(
          [&](const Eigen::Vector3d& v, double) -> Eigen::Vector3d { return dubins_field(v, u, p); },
          s, dt);
    }
    const DubinsState exact = oracle::dubins_arc(s0, p.speed, u, 1.0);
    CHECK(std::hypot(s[0] - exact.pos.x, s[1] - exact.pos.y) <= 1e-6);
    CHECK(std::abs(s[2] - exact.heading) <= 1e-12);
  }
}

TEST_CASE("wrap angle") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2 * kPi));
}
