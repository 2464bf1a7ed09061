#include "fbmq/workload.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fbmq/errors.hpp"
#include "internal_util.hpp"

namespace fbmq {

using detail::checked_steps;
using detail::snapped_floor;

void QueueParams::validate() const {
  if (!(drain > 0.0) || !std::isfinite(drain)) {
    throw std::invalid_argument("drain rate must be positive and finite");
  }
}

WorkloadPath stationary_window_from_driver(const QueueParams& params,
                                           const GaussianPath& driver, double window_end,
                                           double horizon) {
  params.validate();
  driver.grid.validate();
  if (driver.kind != PathKind::Fbm) {
    throw std::invalid_argument("stationary window requires an fBm driver");
  }
  if (driver.grid.start != 0.0) {
    throw std::invalid_argument("driver grid must start at 0");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive and finite");
  }
  const double step = driver.grid.step;
  const std::size_t window_count =
      static_cast<std::size_t>(checked_steps(window_end, step, "window_end")) + 1;
  const std::size_t lookahead = static_cast<std::size_t>(
      std::max<std::int64_t>(1, checked_steps(horizon, step, "horizon")));
  const std::size_t needed = window_count + lookahead;
  if (needed > driver.values.size()) {
    throw std::invalid_argument("driver path too short for window_end + horizon");
  }

  // Net input X_j = B(t_j) - c t_j; the workload at t_i is the sliding
  // maximum of X over [i, i + lookahead] minus X_i.
  std::vector<double> net(needed);
  for (std::size_t j = 0; j < needed; ++j) {
    net[j] = driver.values[j] - params.drain * driver.grid.point(j);
  }

  WorkloadPath out;
  out.grid = TimeGrid{0.0, step, window_count};
  out.values.resize(window_count);
  out.truncation_horizon = static_cast<double>(lookahead) * step;

  std::deque<std::size_t> maxima;  // indices with decreasing net values
  auto push = [&](std::size_t j) {
    while (!maxima.empty() && net[maxima.back()] <= net[j]) maxima.pop_back();
    maxima.push_back(j);
  };
  for (std::size_t j = 0; j <= lookahead; ++j) push(j);
  out.values[0] = net[maxima.front()] - net[0];
  for (std::size_t i = 1; i < window_count; ++i) {
    if (maxima.front() < i) maxima.pop_front();
    push(i + lookahead);
    out.values[i] = net[maxima.front()] - net[i];
  }
  return out;
}

WorkloadPath simulate_stationary_window(const QueueParams& params, double window_end,
                                        double horizon, double step, Rng& rng) {
  params.validate();
  const std::size_t window_count =
      static_cast<std::size_t>(checked_steps(window_end, step, "window_end")) + 1;
  const std::size_t lookahead = static_cast<std::size_t>(
      std::max<std::int64_t>(1, checked_steps(horizon, step, "horizon")));
  TimeGrid grid{0.0, step, window_count + lookahead};
  GaussianPath driver = sample_fbm(grid, params.hurst, rng);
  return stationary_window_from_driver(params, driver, window_end, horizon);
}

WorkloadPath simulate_forward(const QueueParams& params, double q0, const GaussianPath& driver) {
  params.validate();
  driver.grid.validate();
  if (driver.kind != PathKind::Fbm) {
    throw std::invalid_argument("forward simulation requires an fBm driver");
  }
  if (driver.grid.start != 0.0) {
    throw std::invalid_argument("driver grid must start at 0");
  }
  if (!(q0 >= 0.0) || !std::isfinite(q0)) {
    throw std::invalid_argument("initial workload must be finite and nonnegative");
  }
  if (driver.values.size() != driver.grid.count) {
    throw std::invalid_argument("driver value count does not match its grid");
  }

  WorkloadPath out;
  out.grid = driver.grid;
  out.values.resize(driver.values.size());
  out.truncation_horizon = 0.0;
  double running_min = 0.0;  // min over j <= i of X_j, with X_0 = 0
  for (std::size_t i = 0; i < driver.grid.count; ++i) {
    const double x = driver.values[i] - params.drain * driver.grid.point(i);
    running_min = std::min(running_min, x);
    out.values[i] = x + std::max(q0, -running_min);
  }
  return out;
}

double sojourn_time(std::span<const double> values, const TimeGrid& grid, double level,
                    double window_begin, double window_end) {
  grid.validate();
  if (values.size() != grid.count) {
    throw std::invalid_argument("value count does not match grid");
  }
  if (!std::isfinite(level) || !std::isfinite(window_begin) || !std::isfinite(window_end)) {
    throw std::invalid_argument("sojourn_time arguments must be finite");
  }
  if (window_end < window_begin) {
    throw std::invalid_argument("window_end must be >= window_begin");
  }
  const double step = grid.step;
  // Grid points with window_begin < t_i <= window_end (half-open on the left).
  const std::int64_t i_lo = snapped_floor((window_begin - grid.start) / step) + 1;
  const std::int64_t i_hi = snapped_floor((window_end - grid.start) / step);
  if (i_lo < 0 || i_hi >= static_cast<std::int64_t>(grid.count)) {
    throw std::invalid_argument("sojourn window not covered by the grid");
  }
  std::size_t hits = 0;
  for (std::int64_t i = i_lo; i <= i_hi; ++i) {
    if (values[static_cast<std::size_t>(i)] > level) ++hits;
  }
  return static_cast<double>(hits) * step;
}

double sojourn_time(const WorkloadPath& path, double level, double window_begin,
                    double window_end) {
  return sojourn_time(path.values, path.grid, level, window_begin, window_end);
}

ExtendedLevel sojourn_level(std::span<const double> window_values, double step,
                            double duration) {
  if (window_values.empty()) {
    throw std::invalid_argument("sojourn_level requires a nonempty window");
  }
  const std::int64_t m = checked_steps(duration, step, "duration") + 1;
  if (m > static_cast<std::int64_t>(window_values.size())) {
    return ExtendedLevel::neg_infinity();
  }
  std::vector<double> scratch(window_values.begin(), window_values.end());
  auto nth = scratch.begin() + (m - 1);
  std::nth_element(scratch.begin(), nth, scratch.end(), std::greater<double>());
  return ExtendedLevel{*nth};
}

double default_horizon(const QueueParams& params, double level_u) {
  params.validate();
  if (!(level_u > 0.0) || !std::isfinite(level_u)) {
    throw std::invalid_argument("level must be positive and finite");
  }
  const double h = params.hurst.value();
  const double t_star = h / (params.drain * (1.0 - h));
  return 8.0 * level_u * t_star;
}

double horizon_tail_bound(const QueueParams& params, double level_u, double horizon) {
  params.validate();
  if (!(level_u > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("level and horizon must be positive");
  }
  const double h = params.hurst.value();
  const double z = (level_u + params.drain * horizon) / std::pow(horizon, h);
  return 0.5 * std::erfc(z / std::sqrt(2.0));
}

}  // namespace fbmq
