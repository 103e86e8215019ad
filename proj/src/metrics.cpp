#include "nrpursuit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nrpursuit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> SimTrace::tracking_error() const {
  std::vector<double> e;
  e.reserve(rows.size());
  for (const auto& r : rows) {
    e.push_back(r.distances.empty() ? kNaN
                                    : *std::min_element(r.distances.begin(), r.distances.end()));
  }
  return e;
}

std::vector<double> SimTrace::distance_series(std::size_t pursuer) const {
  std::vector<double> d;
  d.reserve(rows.size());
  for (const auto& r : rows) d.push_back(r.distances.at(pursuer));
  return d;
}

std::size_t find_capture(std::span<const double> s, double threshold) {
  const std::size_t n = s.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(s[k] < threshold)) continue;
    const bool left_ok = k == 0 || s[k] <= s[k - 1];
    const bool right_ok = k + 1 == n || s[k] <= s[k + 1];
    if (left_ok && right_ok) return k;
  }
  return n;
}

SummaryMetrics compute_summary(const SimTrace& trace) {
  SummaryMetrics m;
  m.capture_threshold = trace.capture_threshold;
  m.heading_rms = kNaN;
  if (trace.rows.empty()) {
    m.capture_time = kNaN;
    m.peak_error = kNaN;
    m.mean_distance = kNaN;
    return m;
  }
  m.final_cost = trace.rows.back().cost;

  const std::vector<double> e = trace.tracking_error();
  const std::size_t kc = find_capture(e, trace.capture_threshold);
  m.captured = kc < e.size();
  if (m.captured) {
    m.capture_time = trace.rows[kc].t;
    m.peak_error = *std::max_element(e.begin() + static_cast<std::ptrdiff_t>(kc), e.end());
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = kc; k < trace.rows.size(); ++k) {
      for (double d : trace.rows[k].distances) {
        sum += d;
        ++count;
      }
    }
    m.mean_distance = count ? sum / static_cast<double>(count) : kNaN;
  } else {
    m.capture_time = kNaN;
    m.peak_error = kNaN;
    m.mean_distance = kNaN;
  }

  if (trace.learning && trace.first_training_time >= 0.0) {
    double sq = 0.0;
    std::size_t count = 0;
    for (const auto& r : trace.rows) {
      if (r.t < trace.first_training_time) continue;
      const double err = wrap_angle(r.predicted_heading - r.evader_heading);
      sq += err * err;
      ++count;
    }
    if (count) m.heading_rms = std::sqrt(sq / static_cast<double>(count));
  }
  return m;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) return kNaN;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return kNaN;
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::size_t> find_peaks(std::span<const double> s, double min_prominence) {
  std::vector<std::size_t> peaks;
  const std::size_t n = s.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(s[i] > s[i - 1] && s[i] >= s[i + 1])) continue;
    double left_min = s[i];
    for (std::size_t j = i; j-- > 0;) {
      if (s[j] > s[i]) break;
      left_min = std::min(left_min, s[j]);
    }
    double right_min = s[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (s[j] > s[i]) break;
      right_min = std::min(right_min, s[j]);
    }
    if (s[i] - std::max(left_min, right_min) >= min_prominence) peaks.push_back(i);
  }
  return peaks;
}

}  // namespace nrpursuit
