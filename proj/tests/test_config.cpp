#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <sstream>

#include "nrpursuit/config.hpp"
#include "nrpursuit/report.hpp"

using namespace nrpursuit;

namespace {

const char* kMinimalAgnostic = R"(
scenario:
  name: minimal
  mode: agnostic_tracking
  duration: 10
pursuers:
  - {speed: 2, u_max: 1.5707963267948966}
reference:
  speed: 1
)";

bool has(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

ConfigError first_error(std::string_view text) {
  const auto parsed = parse_config_text(text);
  REQUIRE(parsed.size() == 1);
  REQUIRE(parsed[0].error.has_value());
  return *parsed[0].error;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(r.ec == std::errc());
  return v;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto parsed = parse_config_text(kMinimalAgnostic);
  REQUIRE(parsed.size() == 1);
  REQUIRE(parsed[0].config.has_value());
  const ScenarioConfig& c = *parsed[0].config;
  CHECK(c.name == "minimal");
  CHECK(c.mode == ScenarioMode::agnostic_tracking);
  CHECK(c.controller.alpha == 20.0);
  CHECK(c.controller.horizon == 0.2);
  CHECK(c.dt == 0.01);
  CHECK(c.controller.jac_epsilon == 1e-4);
  CHECK(c.controller.prediction_substeps == 50);
  CHECK(c.objective == ObjectiveKind::terminal);
  CHECK(c.reference.radius1 == 10.0);
  const auto& d = parsed[0].defaulted;
  for (const char* f : {"controller.alpha", "controller.horizon", "scenario.dt", "objective.beta1",
                        "reference.radius1", "pursuers[0].heading"}) {
    CHECK_MESSAGE(has(d, f), f);
  }
  CHECK_FALSE(has(d, "scenario.duration"));
}

TEST_CASE("negative dt is rejected with its field and line") {
  const ConfigError e = first_error(R"(scenario:
  name: bad
  mode: agnostic_tracking
  duration: 10
  dt: -0.01
pursuers:
  - {speed: 2, u_max: 1}
reference: {speed: 1}
)");
  CHECK(e.field() == "scenario.dt");
  CHECK(e.line() == 5);
  CHECK(std::string(e.what()).find("scenario.dt") != std::string::npos);
}

TEST_CASE("unknown mode lists the valid modes") {
  const ConfigError e = first_error(R"(scenario: {name: x, mode: chase, duration: 1}
pursuers: [{speed: 2, u_max: 1}]
)");
  CHECK(e.field() == "scenario.mode");
  const std::string msg = e.what();
  for (const char* m : {"agnostic_tracking", "single_pursuer_adversarial",
                        "multi_pursuer_model_based", "multi_pursuer_learning"}) {
    CHECK(msg.find(m) != std::string::npos);
  }
}

TEST_CASE("missing required field is named") {
  const ConfigError e = first_error(R"(scenario: {name: x, mode: single_pursuer_adversarial, duration: 1}
pursuers:
  - {speed: 2, u_max: 1}
evader:
  goal: [1, 1]
)");
  CHECK(e.field() == "evader.speed");
  CHECK(e.line() == 5);
}

TEST_CASE("unknown keys are rejected with the allowed list") {
  const ConfigError e = first_error(R"(scenario: {name: x, mode: single_pursuer_adversarial, duration: 1}
pursuers:
  - {speed: 2, u_max: 1}
evader: {speed: 1, goal: [1, 1]}
controller:
  alpha: 5
  horizn: 0.3
)");
  CHECK(e.field() == "controller.horizn");
  CHECK(e.line() == 7);
  CHECK(std::string(e.what()).find("horizon") != std::string::npos);
}

TEST_CASE("validation errors point at the offending entry") {
  const ConfigError e = first_error(R"(scenario: {name: x, mode: single_pursuer_adversarial, duration: 1}
pursuers:
  - speed: 2
    u_max: -1
evader: {speed: 1, goal: [1, 1]}
)");
  CHECK(e.field() == "pursuers[0].u_max");
  CHECK(e.line() == 4);
}

TEST_CASE("one broken scenario does not block the others") {
  const auto parsed = parse_config_text(R"(scenarios:
  - scenario: {name: good, mode: single_pursuer_adversarial, duration: 1}
    pursuers: [{speed: 2, u_max: 1}]
    evader: {speed: 1, goal: [5, 5]}
  - scenario: {name: broken, mode: single_pursuer_adversarial, duration: 1, dt: 0}
    pursuers: [{speed: 2, u_max: 1}]
    evader: {speed: 1, goal: [5, 5]}
  - scenario: {name: good, mode: single_pursuer_adversarial, duration: 1}
    pursuers: [{speed: 2, u_max: 1}]
    evader: {speed: 1, goal: [5, 5]}
)");
  REQUIRE(parsed.size() == 3);
  CHECK(parsed[0].config.has_value());
  CHECK(parsed[1].error.has_value());
  CHECK(parsed[1].name == "broken");
  CHECK(parsed[2].error.has_value());  // duplicate name
  CHECK_THROWS_AS(parse_config(R"(scenario: {name: x, mode: nope, duration: 1})"), ConfigError);
}

TEST_CASE("document level errors throw") {
  CHECK_THROWS_AS(parse_config_text("scenarios: [unclosed"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("- just a list"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/file.yaml"), ConfigError);
}

TEST_CASE("sections that do not belong to the mode are rejected") {
  const ConfigError e = first_error(R"(scenario: {name: x, mode: single_pursuer_adversarial, duration: 1}
pursuers: [{speed: 2, u_max: 1}]
evader: {speed: 1, goal: [1, 1]}
learning: {eta: 0.1}
)");
  CHECK(e.field() == "learning");
}

TEST_CASE("shared gamma and separate overrides") {
  auto c = parse_config(R"(scenario: {name: x, mode: multi_pursuer_model_based, duration: 1}
pursuers: [{speed: 2, u_max: 1}, {speed: 2, u_max: 1, y: 3}]
evader: {speed: 1, goal: [1, 1]}
objective: {gamma: 0.3}
)");
  CHECK(c[0].weights.gamma_cost == 0.3);
  CHECK(c[0].weights.gamma_repel == 0.3);
  CHECK(c[0].objective == ObjectiveKind::cooperative);
  c = parse_config(R"(scenario: {name: x, mode: multi_pursuer_model_based, duration: 1}
pursuers: [{speed: 2, u_max: 1}, {speed: 2, u_max: 1, y: 3}]
evader: {speed: 1, goal: [1, 1]}
objective: {gamma: 0.3, gamma_repel: 2}
)");
  CHECK(c[0].weights.gamma_cost == 0.3);
  CHECK(c[0].weights.gamma_repel == 2.0);
}

TEST_CASE("shipped study file loads") {
  const auto cfgs = load_config(std::string(NRPURSUIT_CONFIG_DIR) + "/studies.yaml");
  REQUIRE(cfgs.size() == 5);
  CHECK(cfgs[4].mode == ScenarioMode::multi_pursuer_learning);
  CHECK(cfgs[4].seed == 7);
  CHECK(cfgs[3].weights.beta3 == 200.0);
  CHECK(cfgs[4].weights.beta3 == 200.0);
}

TEST_CASE("summary echo round-trips every effective value") {
  const auto cfgs = load_config(std::string(NRPURSUIT_CONFIG_DIR) + "/studies.yaml");
  for (const auto& c : cfgs) {
    RunResult r;
    std::stringstream ss;
    write_summary(ss, c, r);
    const auto kv = read_key_values(ss);
    const auto echo = config_echo(c);
    for (const auto& [k, v] : echo) {
      REQUIRE(kv.count(k));
      CHECK(kv.at(k) == v);
    }
    CHECK(parse_double(kv.at("scenario.dt")) == c.dt);
    CHECK(parse_double(kv.at("controller.alpha")) == c.controller.alpha);
    CHECK(parse_double(kv.at("controller.horizon")) == c.controller.horizon);
    CHECK(parse_double(kv.at("pursuers[0].u_max")) == c.pursuers[0].params.u_max);
    CHECK(parse_double(kv.at("objective.gamma_repel")) == c.weights.gamma_repel);
    CHECK(kv.at("scenario.mode") == std::string(to_string(c.mode)));
    if (c.mode != ScenarioMode::agnostic_tracking) {
      CHECK(parse_double(kv.at("evader.goal[0]")) == c.evader.goal.x);
      CHECK(parse_double(kv.at("evader.speed")) == c.evader.speed);
    }
  }
}

TEST_CASE("double formatting is round-trip exact") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e-300, -2.5e17}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
