#pragma once

#include "nrpursuit/dynamics.hpp"

namespace nrpursuit {

/// Known target path: two semicircles traversed at constant speed, the first
/// clockwise over the top and the second counter-clockwise underneath, joined
/// tangentially on the x-axis through `start`. Past the second semicircle the
/// target continues straight along its final tangent.
struct ReferenceSpec {
  Vec2 start;
  double radius1 = 10.0;  // m
  double radius2 = 10.0;  // m
  double speed = 1.0;     // m/s

  void validate() const;
  double arc_length() const;
};

Vec2 reference_trajectory(const ReferenceSpec& spec, double t);

/// Direction of travel at time t.
double reference_heading(const ReferenceSpec& spec, double t);

}  // namespace nrpursuit
