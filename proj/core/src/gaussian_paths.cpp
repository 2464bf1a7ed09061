#include "fbmq/gaussian_paths.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbmq/errors.hpp"
#include "fbmq/logging.hpp"

namespace fbmq {

namespace {

LogHandler g_log_handler = nullptr;

void default_log(const std::string& message) { std::cerr << "[fbmq] " << message << "\n"; }

// FFTW plan creation and destruction are not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

void set_log_handler(LogHandler handler) { g_log_handler = handler; }

void log_warning(const std::string& message) {
  if (g_log_handler) {
    g_log_handler(message);
  } else {
    default_log(message);
  }
}

void TimeGrid::validate() const {
  if (count == 0) throw std::invalid_argument("TimeGrid: count must be positive");
  if (!std::isfinite(start)) throw std::invalid_argument("TimeGrid: start must be finite");
  if (!std::isfinite(step) || step <= 0.0) {
    throw std::invalid_argument("TimeGrid: step must be positive and finite");
  }
}

double fbm_covariance(double s, double t, HurstParam hurst) {
  if (!std::isfinite(s) || !std::isfinite(t)) {
    throw std::invalid_argument("fbm_covariance: arguments must be finite");
  }
  const double a = 2.0 * hurst.value();
  return 0.5 * (std::pow(std::fabs(s), a) + std::pow(std::fabs(t), a) -
                std::pow(std::fabs(t - s), a));
}

namespace {

// Autocovariance of fractional Gaussian noise at lag k for increments over
// step d: gamma(k) = d^{2H} * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocov(std::uint64_t lag, double step, double hurst) {
  const double a = 2.0 * hurst;
  const double k = static_cast<double>(lag);
  const double scale = std::pow(step, a);
  if (lag == 0) return scale;
  return 0.5 * scale *
         (std::pow(k + 1.0, a) - 2.0 * std::pow(k, a) + std::pow(k - 1.0, a));
}

}  // namespace

struct FbmSampler::Impl {
  enum class Mode { Brownian, Circulant, Dense };

  std::size_t points_left = 0;
  std::size_t points_right = 0;
  double step = 0.0;
  HurstParam hurst{0.5};
  Mode mode = Mode::Brownian;
  std::size_t clipped = 0;

  // Circulant route: sqrt of embedding eigenvalues, FFTW buffers and plan.
  std::size_t embed_size = 0;
  std::vector<double> sqrt_eigen;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  // Dense route: lower Cholesky factor of the increment covariance.
  Eigen::MatrixXd chol_lower;

  std::vector<double> increments;

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }

  std::size_t total_points() const { return points_left + points_right + 1; }
  std::size_t increment_count() const { return total_points() - 1; }

  void build_dense() {
    const std::size_t n = increment_count();
    if (n > kMaxDensePoints) {
      throw ResourceError("FbmSampler: grid too large for dense factorization fallback (" +
                          std::to_string(n) + " increments, cap " +
                          std::to_string(kMaxDensePoints) + ")");
    }
    Eigen::MatrixXd gamma(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double g = fgn_autocov(i - j, step, hurst.value());
        gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g;
        gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = g;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gamma);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("FbmSampler: increment covariance is not positive definite");
    }
    chol_lower = llt.matrixL();
    mode = Mode::Dense;
  }

  void build_circulant() {
    const std::size_t n = increment_count();
    embed_size = 2 * n;
    std::vector<std::complex<double>> first_row(embed_size);
    for (std::size_t j = 0; j < embed_size; ++j) {
      const std::uint64_t lag = j <= n ? j : embed_size - j;
      first_row[j] = fgn_autocov(lag, step, hurst.value());
    }

    {
      std::lock_guard<std::mutex> lock(plan_mutex());
      in = fftw_alloc_complex(embed_size);
      out = fftw_alloc_complex(embed_size);
      plan = fftw_plan_dft_1d(static_cast<int>(embed_size), in, out, FFTW_FORWARD,
                              FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("FbmSampler: FFT plan creation failed");

    for (std::size_t j = 0; j < embed_size; ++j) {
      in[j][0] = first_row[j].real();
      in[j][1] = 0.0;
    }
    fftw_execute(plan);

    std::vector<double> eigen(embed_size);
    double max_eigen = 0.0;
    for (std::size_t j = 0; j < embed_size; ++j) {
      eigen[j] = out[j][0];
      if (eigen[j] > max_eigen) max_eigen = eigen[j];
    }
    const double clip_floor = -1e-10 * max_eigen;
    bool needs_dense = false;
    for (std::size_t j = 0; j < embed_size; ++j) {
      if (eigen[j] < 0.0) {
        if (eigen[j] > clip_floor) {
          eigen[j] = 0.0;
          ++clipped;
        } else {
          needs_dense = true;
          break;
        }
      }
    }
    if (needs_dense) {
      {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
        plan = nullptr;
        in = nullptr;
        out = nullptr;
      }
      log_warning("FbmSampler: circulant embedding not nonnegative definite (H=" +
                  std::to_string(hurst.value()) + "); using dense factorization");
      build_dense();
      return;
    }
    if (clipped > 0) {
      log_warning("FbmSampler: clipped " + std::to_string(clipped) +
                  " marginally negative embedding eigenvalues to zero");
    }
    sqrt_eigen.resize(embed_size);
    for (std::size_t j = 0; j < embed_size; ++j) sqrt_eigen[j] = std::sqrt(eigen[j]);
    mode = Mode::Circulant;
  }

  void draw_increments(Rng& rng) {
    const std::size_t n = increment_count();
    increments.resize(n);
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (mode) {
      case Mode::Brownian: {
        const double sd = std::sqrt(step);
        for (std::size_t j = 0; j < n; ++j) increments[j] = sd * normal(rng);
        break;
      }
      case Mode::Circulant: {
        const std::size_t m = embed_size;
        const std::size_t half = m / 2;
        in[0][0] = sqrt_eigen[0] * normal(rng);
        in[0][1] = 0.0;
        in[half][0] = sqrt_eigen[half] * normal(rng);
        in[half][1] = 0.0;
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        for (std::size_t k = 1; k < half; ++k) {
          const double a = sqrt_eigen[k] * inv_sqrt2;
          const double re = a * normal(rng);
          const double im = a * normal(rng);
          in[k][0] = re;
          in[k][1] = im;
          in[m - k][0] = re;
          in[m - k][1] = -im;
        }
        fftw_execute(plan);
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        for (std::size_t j = 0; j < n; ++j) increments[j] = out[j][0] * scale;
        break;
      }
      case Mode::Dense: {
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) z(static_cast<Eigen::Index>(j)) = normal(rng);
        Eigen::VectorXd e = chol_lower * z;
        for (std::size_t j = 0; j < n; ++j) increments[j] = e(static_cast<Eigen::Index>(j));
        break;
      }
    }
  }
};

FbmSampler::FbmSampler(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

FbmSampler::FbmSampler(std::size_t points_left, std::size_t points_right, double step,
                       HurstParam hurst)
    : impl_(std::make_unique<Impl>()) {
  if (!std::isfinite(step) || step <= 0.0) {
    throw std::invalid_argument("FbmSampler: step must be positive and finite");
  }
  const std::size_t total = points_left + points_right + 1;
  if (total > kMaxGridPoints) {
    throw ResourceError("FbmSampler: grid of " + std::to_string(total) +
                        " points exceeds cap of " + std::to_string(kMaxGridPoints));
  }
  impl_->points_left = points_left;
  impl_->points_right = points_right;
  impl_->step = step;
  impl_->hurst = hurst;
  if (impl_->increment_count() == 0) {
    impl_->mode = Impl::Mode::Brownian;
    return;
  }
  if (hurst.is_brownian()) {
    impl_->mode = Impl::Mode::Brownian;
  } else {
    impl_->build_circulant();
  }
}

FbmSampler FbmSampler::dense(std::size_t points_left, std::size_t points_right, double step,
                             HurstParam hurst) {
  auto impl = std::make_unique<Impl>();
  impl->points_left = points_left;
  impl->points_right = points_right;
  impl->step = step;
  impl->hurst = hurst;
  if (impl->increment_count() > 0) impl->build_dense();
  return FbmSampler(std::move(impl));
}

FbmSampler::~FbmSampler() = default;
FbmSampler::FbmSampler(FbmSampler&&) noexcept = default;
FbmSampler& FbmSampler::operator=(FbmSampler&&) noexcept = default;

std::size_t FbmSampler::point_count() const noexcept { return impl_->total_points(); }
std::size_t FbmSampler::zero_index() const noexcept { return impl_->points_left; }
HurstParam FbmSampler::hurst() const noexcept { return impl_->hurst; }
double FbmSampler::step() const noexcept { return impl_->step; }
bool FbmSampler::used_dense_fallback() const noexcept {
  return impl_->mode == Impl::Mode::Dense;
}
std::size_t FbmSampler::clipped_eigenvalues() const noexcept { return impl_->clipped; }

void FbmSampler::sample(Rng& rng, std::span<double> out) {
  const std::size_t total = impl_->total_points();
  if (out.size() != total) {
    throw std::invalid_argument("FbmSampler::sample: output span has wrong size");
  }
  if (total == 1) {
    out[0] = 0.0;
    return;
  }
  impl_->draw_increments(rng);
  double acc = 0.0;
  out[0] = 0.0;
  for (std::size_t j = 1; j < total; ++j) {
    acc += impl_->increments[j - 1];
    out[j] = acc;
  }
  const double pin = out[impl_->points_left];
  if (pin != 0.0) {
    for (std::size_t j = 0; j < total; ++j) out[j] -= pin;
  }
}

GaussianPath sample_fbm(const TimeGrid& grid, HurstParam hurst, Rng& rng) {
  grid.validate();
  if (grid.start != 0.0) {
    throw std::invalid_argument("sample_fbm: grid must start at 0");
  }
  GaussianPath path;
  path.grid = grid;
  path.kind = PathKind::Fbm;
  path.values.resize(grid.count);
  FbmSampler sampler(0, grid.count - 1, grid.step, hurst);
  sampler.sample(rng, path.values);
  return path;
}

void w_transform(const TimeGrid& grid, HurstParam hurst, std::span<double> values) {
  const double a = 2.0 * hurst.value();
  const double sqrt2 = std::sqrt(2.0);
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double t = grid.point(j);
    values[j] = sqrt2 * values[j] - std::pow(std::fabs(t), a);
  }
}

GaussianPath sample_w_path(const TimeGrid& grid, HurstParam hurst, Rng& rng) {
  GaussianPath path = sample_fbm(grid, hurst, rng);
  w_transform(grid, hurst, std::span<double>(path.values));
  path.kind = PathKind::WField;
  return path;
}

}  // namespace fbmq
