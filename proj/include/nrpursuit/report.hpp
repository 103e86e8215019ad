#pragma once

// Output formats.
//
// Trace: comma-separated, header row first, one row per step. Columns, in
// order:
//   t,
//   p<i>_x, p<i>_y, p<i>_theta, p<i>_u        for i = 1..N
//   evader_x, evader_y,
//   d<i>                                      for i = 1..N
//   d_p, g, J, evader_heading, predicted_heading, nn_loss
// Headings are wrapped to (-pi, pi]. Missing values are written as `nan`.
//
// Summary: `key = value` lines; every effective configuration value is echoed
// under its config path, followed by the run metrics.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nrpursuit/sim.hpp"

namespace nrpursuit {

std::vector<std::string> trace_columns(std::size_t n_pursuers);

void write_trace_csv(std::ostream& out, const SimTrace& trace);

void write_summary(std::ostream& out, const ScenarioConfig& cfg, const RunResult& result,
                   const std::vector<std::string>& defaulted = {});

/// Effective configuration as key/value pairs (doubles printed round-trip exact).
std::map<std::string, std::string> config_echo(const ScenarioConfig& cfg);

/// Parses a summary document back into key/value pairs.
std::map<std::string, std::string> read_key_values(std::istream& in);

std::string format_double(double v);

}  // namespace nrpursuit
