#include "nrpursuit/reference.hpp"

#include <cmath>
#include <numbers>

namespace nrpursuit {

using std::numbers::pi;

void ReferenceSpec::validate() const {
  if (!start.finite()) throw ConfigError("reference.start", "must be finite");
  if (!(radius1 > 0.0) || !std::isfinite(radius1)) {
    throw ConfigError("reference.radius1", "must be > 0");
  }
  if (!(radius2 > 0.0) || !std::isfinite(radius2)) {
    throw ConfigError("reference.radius2", "must be > 0");
  }
  if (!(speed >= 0.0) || !std::isfinite(speed)) throw ConfigError("reference.speed", "must be >= 0");
}

double ReferenceSpec::arc_length() const { return pi * (radius1 + radius2); }

Vec2 reference_trajectory(const ReferenceSpec& spec, double t) {
  const double s = spec.speed * t;
  const double r1 = spec.radius1;
  const double r2 = spec.radius2;
  const double first = pi * r1;
  if (s <= first) {
    const Vec2 c{spec.start.x + r1, spec.start.y};
    const double phi = pi - s / r1;
    return {c.x + r1 * std::cos(phi), c.y + r1 * std::sin(phi)};
  }
  const Vec2 c{spec.start.x + 2.0 * r1 + r2, spec.start.y};
  const double s2 = s - first;
  if (s2 <= pi * r2) {
    const double phi = pi + s2 / r2;
    return {c.x + r2 * std::cos(phi), c.y + r2 * std::sin(phi)};
  }
  // Straight continuation upward from the end of the second semicircle.
  return {c.x + r2, c.y + (s2 - pi * r2)};
}

double reference_heading(const ReferenceSpec& spec, double t) {
  const double s = spec.speed * t;
  const double first = pi * spec.radius1;
  if (s <= first) return pi / 2.0 - s / spec.radius1;
  const double s2 = s - first;
  if (s2 <= pi * spec.radius2) return -pi / 2.0 + s2 / spec.radius2;
  return pi / 2.0;
}

}  // namespace nrpursuit
