#pragma once

#include <cstddef>
#include <vector>

namespace fbmq {

// Uniform time grid t_k = start + k*step, k = 0..count-1.
struct TimeGrid {
  double start = 0.0;
  double step = 0.0;
  std::size_t count = 0;

  double point(std::size_t k) const noexcept { return start + static_cast<double>(k) * step; }
  double span() const noexcept { return count > 1 ? static_cast<double>(count - 1) * step : 0.0; }

  // Throws std::invalid_argument on non-finite or non-positive step, zero count.
  void validate() const;
};

enum class PathKind { Fbm, WField };

// One sampled path on a uniform grid. Fbm paths start at value 0 when the grid
// starts at 0; WField paths hold sqrt(2)*B_H(t) - |t|^{2H}.
struct GaussianPath {
  TimeGrid grid;
  std::vector<double> values;
  PathKind kind = PathKind::Fbm;
};

}  // namespace fbmq
