#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "fbmq/hurst.hpp"
#include "fbmq/rng.hpp"
#include "fbmq/time_grid.hpp"

namespace fbmq {

// Cov(B_H(s), B_H(t)) = (|s|^{2H} + |t|^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double s, double t, HurstParam hurst);

// Exact sampler for fractional Brownian motion on the fixed uniform grid
// t_j = (j - points_left) * step, j = 0 .. points_left + points_right,
// pinned to B(0) = 0 at j = points_left. One-sided [0, T] grids use
// points_left = 0. Stationary increments are drawn by circulant embedding of
// the fractional Gaussian noise covariance (eigenvalues via one FFT, one FFT
// per draw); H = 1/2 short-circuits to independent N(0, step) increments. A
// mildly negative embedding spectrum (above -1e-10 of the largest eigenvalue)
// is clipped to zero with a warning; anything worse falls back to a dense
// Cholesky factorization of the increment covariance, capped in size.
class FbmSampler {
 public:
  FbmSampler(std::size_t points_left, std::size_t points_right, double step, HurstParam hurst);
  ~FbmSampler();
  FbmSampler(FbmSampler&&) noexcept;
  FbmSampler& operator=(FbmSampler&&) noexcept;
  FbmSampler(const FbmSampler&) = delete;
  FbmSampler& operator=(const FbmSampler&) = delete;

  std::size_t point_count() const noexcept;
  std::size_t zero_index() const noexcept;
  HurstParam hurst() const noexcept;
  double step() const noexcept;

  // Draws one exact path into out (size point_count()), out[zero_index()] = 0.
  // Deterministic given the stream state.
  void sample(Rng& rng, std::span<double> out);

  bool used_dense_fallback() const noexcept;
  std::size_t clipped_eigenvalues() const noexcept;

  // Test hook: skip the circulant route and factorize densely.
  static FbmSampler dense(std::size_t points_left, std::size_t points_right, double step,
                          HurstParam hurst);

 private:
  struct Impl;
  FbmSampler(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// One draw of B_H on a grid starting at 0 (grid.start must be 0; count == 1
// yields the single value 0).
GaussianPath sample_fbm(const TimeGrid& grid, HurstParam hurst, Rng& rng);

// One draw of W_H(t) = sqrt(2) * B_H(t) - |t|^{2H} on the same grid family.
GaussianPath sample_w_path(const TimeGrid& grid, HurstParam hurst, Rng& rng);

// Applies the W transform in place to a sampled fBm path.
void w_transform(const TimeGrid& grid, HurstParam hurst, std::span<double> values);

inline constexpr std::size_t kMaxGridPoints = (std::size_t{1} << 20) + 1;
inline constexpr std::size_t kMaxDensePoints = 4096;

}  // namespace fbmq
