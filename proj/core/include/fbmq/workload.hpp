#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "fbmq/gaussian_paths.hpp"
#include "fbmq/hurst.hpp"
#include "fbmq/rng.hpp"
#include "fbmq/time_grid.hpp"

namespace fbmq {

// Fluid queue fed by fractional Brownian motion, drained at constant rate.
struct QueueParams {
  HurstParam hurst;
  double drain;  // c > 0

  void validate() const;
};

// Discretized workload trajectory; truncation_horizon records how far past the
// window the driving path extended when the stationary supremum was truncated
// (0 for forward simulations started from a known level).
struct WorkloadPath {
  TimeGrid grid;
  std::vector<double> values;
  double truncation_horizon = 0.0;
};

// Real level extended with a negative-infinity sentinel; exp() of the sentinel
// is exactly 0.
struct ExtendedLevel {
  double value = -std::numeric_limits<double>::infinity();

  static ExtendedLevel neg_infinity() noexcept { return ExtendedLevel{}; }
  bool is_neg_infinity() const noexcept { return std::isinf(value) && value < 0.0; }
  double exp_value() const noexcept { return std::exp(value); }
};

// Stationary workload on [0, window_end]:
//   Q(t_i) = max over s_j in [t_i, t_i + horizon] of (B(s_j) - B(t_i) - c (s_j - t_i)),
// with the infinite supremum truncated at `horizon`. One driving path on
// [0, window_end + horizon] serves every window point (sliding maximum).
WorkloadPath simulate_stationary_window(const QueueParams& params, double window_end,
                                        double horizon, double step, Rng& rng);

// Same transform applied to an already-sampled driver covering
// [0, window_end + horizon]; deterministic.
WorkloadPath stationary_window_from_driver(const QueueParams& params,
                                           const GaussianPath& driver, double window_end,
                                           double horizon);

// Forward dynamics from a known initial level:
//   Q(t_i) = B(t_i) - c t_i + max(q0, -min over s_j <= t_i of (B(s_j) - c s_j)).
WorkloadPath simulate_forward(const QueueParams& params, double q0, const GaussianPath& driver);

// Time spent strictly above `level` among grid points with window_begin < t_i
// <= window_end, in units of the grid step. Throws if the window is not
// covered by the grid.
double sojourn_time(std::span<const double> values, const TimeGrid& grid, double level,
                    double window_begin, double window_end);
double sojourn_time(const WorkloadPath& path, double level, double window_begin,
                    double window_end);

// Largest level z such that the discrete sojourn above z still exceeds
// `duration`: the m-th largest of the window values with m = floor(x/step)+1,
// NEG_INFINITY once m exceeds the window (a sojourn can never exceed the
// window length).
ExtendedLevel sojourn_level(std::span<const double> window_values, double step,
                            double duration);

// Default truncation horizon 8 * u * t_star(H, c), t_star = H / (c (1-H)).
double default_horizon(const QueueParams& params, double level_u);

// Crude Gaussian bound on the mass the truncation discards:
// P(B_H(s) - c s > u for some s >= horizon) <~ Psi((u + c h) / h^H).
double horizon_tail_bound(const QueueParams& params, double level_u, double horizon);

}  // namespace fbmq
