#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nrpursuit/dynamics.hpp"

namespace nrpursuit {

struct TraceRow {
  double t = 0.0;
  std::vector<DubinsState> pursuers;
  std::vector<double> u;
  Vec2 evader;
  std::vector<double> distances;       // |evader - pursuer_i|
  double pursuer_separation = 0.0;     // min pairwise distance, NaN for one pursuer
  double objective = 0.0;              // controller objective g at this state
  double cost = 0.0;                   // discounted cost accumulated up to t
  double evader_heading = 0.0;         // heading actually flown
  double predicted_heading = 0.0;      // pursuers' estimate
  double nn_loss = 0.0;                // last windowed training loss, NaN if none
};

struct SimTrace {
  std::size_t n_pursuers = 0;
  double capture_threshold = 0.0;
  bool learning = false;  // heading estimates come from the network
  double first_training_time = -1.0;  // < 0 when the network was never trained
  std::vector<TraceRow> rows;

  /// min_i d_i per row.
  std::vector<double> tracking_error() const;
  std::vector<double> distance_series(std::size_t pursuer) const;
};

struct SummaryMetrics {
  bool captured = false;
  double capture_threshold = 0.0;
  double capture_time = 0.0;         // NaN when never captured
  double peak_error = 0.0;           // max tracking error from capture on
  double mean_distance = 0.0;        // mean over pursuers and post-capture rows of d_i
  double final_cost = 0.0;
  double heading_rms = 0.0;          // NaN outside learning mode
  std::size_t training_failures = 0;
};

/// Capture is the first local minimum of the tracking error that lies below
/// the trace's capture threshold; the first and last rows count as local
/// minima when they do not exceed their single neighbour.
SummaryMetrics compute_summary(const SimTrace& trace);

/// Index of the capture row, or series.size() when there is none.
std::size_t find_capture(std::span<const double> series, double threshold);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Local maxima whose prominence (height above the higher of the two
/// surrounding minima) is at least min_prominence.
std::vector<std::size_t> find_peaks(std::span<const double> series, double min_prominence);

}  // namespace nrpursuit
