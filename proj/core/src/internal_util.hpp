#pragma once

// Internal numeric helpers shared by the library sources; not installed.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>

namespace fbmq::detail {

// Snap near-integer ratios before rounding down/up so exact multiples of a
// grid step are not lost to floating-point representation error.
inline double snapped(double ratio) {
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) < 1e-9 * std::max(1.0, std::abs(rounded))) {
    return rounded;
  }
  return ratio;
}

inline std::int64_t snapped_floor(double ratio) {
  return static_cast<std::int64_t>(std::floor(snapped(ratio)));
}

inline std::int64_t snapped_ceil(double ratio) {
  return static_cast<std::int64_t>(std::ceil(snapped(ratio)));
}

inline std::int64_t checked_steps(double span, double step, const char* what) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("step must be positive and finite");
  }
  if (!(span >= 0.0) || !std::isfinite(span)) {
    throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
  }
  return snapped_floor(span / step);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
};

// Two-pass mean / standard error over replicate values, in index order so the
// result is independent of how replicates were scheduled across workers.
// NaN entries are treated as dropped replicates (guarded overflow etc.).
inline MeanSe reduce_mean_se(std::span<const double> values) {
  MeanSe out;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++out.n;
  }
  if (out.n == 0) return out;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n == 1) return out;
  double ss = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    const double d = v - out.mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

// Deterministic decimal rendering for CSV/JSON output (byte-identical across
// runs and worker counts for identical doubles).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline bool nearly_equal(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace fbmq::detail
