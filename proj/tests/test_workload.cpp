#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fbmq/gaussian_paths.hpp"
#include "fbmq/rng.hpp"
#include "fbmq/workload.hpp"

using fbmq::GaussianPath;
using fbmq::HurstParam;
using fbmq::QueueParams;
using fbmq::TimeGrid;
using fbmq::WorkloadPath;

namespace {

GaussianPath zero_driver(double step, std::size_t count) {
  GaussianPath p;
  p.grid = TimeGrid{0.0, step, count};
  p.values.assign(count, 0.0);
  p.kind = fbmq::PathKind::Fbm;
  return p;
}

}  // namespace

TEST_SUITE("workload") {

TEST_CASE("forward dynamics drain a zero-input queue linearly") {
  const QueueParams params{HurstParam(0.5), 1.0};
  const GaussianPath driver = zero_driver(0.25, 13);  // [0, 3]
  const WorkloadPath wp = fbmq::simulate_forward(params, 1.5, driver);
  REQUIRE(wp.values.size() == 13);
  CHECK(wp.values[0] == doctest::Approx(1.5));
  CHECK(wp.values[4] == doctest::Approx(0.5));   // t = 1
  CHECK(wp.values[6] == doctest::Approx(0.0));   // t = 1.5: hits empty
  CHECK(wp.values[12] == doctest::Approx(0.0));  // stays empty
  CHECK(wp.truncation_horizon == 0.0);
}

TEST_CASE("forward dynamics satisfy the one-step recursion pathwise") {
  const QueueParams params{HurstParam(0.7), 1.3};
  const TimeGrid grid{0.0, 0.03125, 129};
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    auto rng = fbmq::substream(101, rep);
    const GaussianPath driver = fbmq::sample_fbm(grid, params.hurst, rng);
    const WorkloadPath wp = fbmq::simulate_forward(params, 0.7, driver);
    for (std::size_t i = 0; i + 1 < wp.values.size(); ++i) {
      const double dx = driver.values[i + 1] - driver.values[i] - params.drain * grid.step;
      const double expected = std::max(wp.values[i] + dx, 0.0);
      REQUIRE(wp.values[i + 1] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward dynamics validate their inputs") {
  const QueueParams params{HurstParam(0.5), 1.0};
  const GaussianPath driver = zero_driver(0.25, 5);
  CHECK_THROWS_AS(fbmq::simulate_forward(params, -0.1, driver), std::invalid_argument);
  CHECK_THROWS_AS(fbmq::simulate_forward(QueueParams{HurstParam(0.5), 0.0}, 1.0, driver),
                  std::invalid_argument);
  GaussianPath wfield = driver;
  wfield.kind = fbmq::PathKind::WField;
  CHECK_THROWS_AS(fbmq::simulate_forward(params, 1.0, wfield), std::invalid_argument);
  GaussianPath shifted = driver;
  shifted.grid.start = 0.5;
  CHECK_THROWS_AS(fbmq::simulate_forward(params, 1.0, shifted), std::invalid_argument);
}

TEST_CASE("stationary window equals the brute-force sliding maximum") {
  const QueueParams params{HurstParam(0.5), 1.0};
  const double step = 0.25;
  const double window_end = 1.0;
  const double horizon = 2.0;
  const TimeGrid grid{0.0, step, 13};  // window 5 points + lookahead 8
  for (std::uint64_t rep = 0; rep < 25; ++rep) {
    auto rng = fbmq::substream(55, rep);
    const GaussianPath driver = fbmq::sample_fbm(grid, params.hurst, rng);
    const WorkloadPath wp =
        fbmq::stationary_window_from_driver(params, driver, window_end, horizon);
    REQUIRE(wp.values.size() == 5);
    const std::size_t lookahead = 8;
    for (std::size_t i = 0; i < 5; ++i) {
      double best = -1e300;
      for (std::size_t j = i; j <= i + lookahead; ++j) {
        const double inc = driver.values[j] - driver.values[i] -
                           params.drain * (grid.point(j) - grid.point(i));
        best = std::max(best, inc);
      }
      REQUIRE(wp.values[i] == doctest::Approx(best).epsilon(1e-12));
      REQUIRE(wp.values[i] >= 0.0);  // j = i term contributes 0
    }
    CHECK(wp.truncation_horizon == doctest::Approx(2.0));
  }
}

TEST_CASE("stationary window validates the driver") {
  const QueueParams params{HurstParam(0.5), 1.0};
  const GaussianPath driver = zero_driver(0.25, 13);
  CHECK_NOTHROW(fbmq::stationary_window_from_driver(params, driver, 1.0, 2.0));
  // Too short for window + horizon.
  CHECK_THROWS_AS(fbmq::stationary_window_from_driver(params, driver, 2.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fbmq::stationary_window_from_driver(params, driver, 1.0, 0.0),
                  std::invalid_argument);
  GaussianPath wfield = driver;
  wfield.kind = fbmq::PathKind::WField;
  CHECK_THROWS_AS(fbmq::stationary_window_from_driver(params, wfield, 1.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("stationary marginal matches the known Brownian tail") {
  // P(Q(0) > 0.5) = exp(-2 * 1 * 0.5) = e^-1 = 0.36788 for H = 1/2, c = 1.
  // The grid supremum and the finite horizon both bias the estimate low.
  const QueueParams params{HurstParam(0.5), 1.0};
  const double step = 0.015625;  // 2^-6
  const int n = 4000;
  int hits = 0;
  for (int rep = 0; rep < n; ++rep) {
    auto rng = fbmq::substream(202, static_cast<std::uint64_t>(rep));
    const WorkloadPath wp = fbmq::simulate_stationary_window(params, 0.0, 8.0, step, rng);
    REQUIRE(wp.values.size() == 1);
    if (wp.values[0] > 0.5) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  const double target = std::exp(-1.0);
  CHECK(p > target - 0.055);  // 4 SE + one-sided discretization allowance
  CHECK(p < target + 0.031);  // 4 SE
}

TEST_CASE("sojourn time counts grid points in the half-open window") {
  const TimeGrid grid{0.0, 0.25, 5};
  const std::vector<double> values{0.0, 1.0, 1.0, 0.0, 1.0};
  // Window (0, 1]: hits at t = 0.25, 0.5, 1.0.
  CHECK(fbmq::sojourn_time(values, grid, 0.5, 0.0, 1.0) == doctest::Approx(0.75));
  // Window (0.25, 0.75]: hit at t = 0.5 only.
  CHECK(fbmq::sojourn_time(values, grid, 0.5, 0.25, 0.75) == doctest::Approx(0.25));
  // End between grid points snaps down to t = 0.75.
  CHECK(fbmq::sojourn_time(values, grid, 0.5, 0.0, 0.95) == doctest::Approx(0.5));
  // Degenerate window holds no grid points.
  CHECK(fbmq::sojourn_time(values, grid, 0.5, 0.3, 0.4) == 0.0);
  // Level is strict: values equal to the level do not count.
  CHECK(fbmq::sojourn_time(values, grid, 1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("sojourn time rejects uncovered windows") {
  const TimeGrid grid{0.0, 0.25, 5};
  const std::vector<double> values{0.0, 1.0, 1.0, 0.0, 1.0};
  CHECK_THROWS_AS(fbmq::sojourn_time(values, grid, 0.5, 0.0, 1.25), std::invalid_argument);
  CHECK_THROWS_AS(fbmq::sojourn_time(values, grid, 0.5, -0.6, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fbmq::sojourn_time(values, grid, 0.5, 0.75, 0.25), std::invalid_argument);
}

TEST_CASE("sojourn level is the m-th largest window value") {
  const std::vector<double> window{3.0, 1.0, 2.0};
  // duration 0 -> m = 1: largest value.
  CHECK(fbmq::sojourn_level(window, 1.0, 0.0).value == 3.0);
  // duration in (0,1) -> still m = 1.
  CHECK(fbmq::sojourn_level(window, 1.0, 0.5).value == 3.0);
  // duration 1 -> m = 2.
  CHECK(fbmq::sojourn_level(window, 1.0, 1.0).value == 2.0);
  // duration 2 -> m = 3.
  CHECK(fbmq::sojourn_level(window, 1.0, 2.0).value == 1.0);
  // duration 3 -> m = 4 exceeds the window: sentinel.
  const auto sentinel = fbmq::sojourn_level(window, 1.0, 3.0);
  CHECK(sentinel.is_neg_infinity());
  CHECK(sentinel.exp_value() == 0.0);
}

TEST_CASE("sojourn level is consistent with sojourn time") {
  // z* is the largest level whose sojourn still exceeds the duration:
  // sojourn_time above z* - eps > duration >= sojourn_time above z* + eps.
  const TimeGrid grid{0.0, 0.5, 6};
  const std::vector<double> values{0.2, 1.4, -0.3, 0.9, 1.1, 0.6};
  for (double duration : {0.0, 0.5, 1.0, 2.0}) {
    const double z = fbmq::sojourn_level(values, 0.5, duration).value;
    const double above = fbmq::sojourn_time(values, grid, z - 1e-9, -0.25, 2.5);
    const double below = fbmq::sojourn_time(values, grid, z + 1e-9, -0.25, 2.5);
    CAPTURE(duration);
    CHECK(above > duration);
    CHECK(below <= duration);
  }
}

TEST_CASE("default horizon scales with the level and the critical time") {
  const QueueParams bm{HurstParam(0.5), 1.0};
  CHECK(fbmq::default_horizon(bm, 3.0) == doctest::Approx(24.0));
  const QueueParams lrd{HurstParam(0.7), 1.0};
  CHECK(fbmq::default_horizon(lrd, 2.0) == doctest::Approx(16.0 * 0.7 / 0.3).epsilon(1e-12));
  CHECK_THROWS_AS(fbmq::default_horizon(bm, 0.0), std::invalid_argument);
}

TEST_CASE("horizon tail bound matches the frozen Gaussian tails") {
  // Psi((u + c h) / h^H): frozen against an independent evaluation.
  const QueueParams lrd{HurstParam(0.7), 1.0};
  CHECK(fbmq::horizon_tail_bound(lrd, 2.0, 16.0) ==
        doctest::Approx(0.0048750071656890658).epsilon(1e-12));
  const QueueParams bm{HurstParam(0.5), 1.0};
  CHECK(fbmq::horizon_tail_bound(bm, 1.0, 9.0) ==
        doctest::Approx(4.2906033319683748e-4).epsilon(1e-12));
  // Longer horizons discard less mass.
  CHECK(fbmq::horizon_tail_bound(lrd, 2.0, 32.0) < fbmq::horizon_tail_bound(lrd, 2.0, 16.0));
}

}  // TEST_SUITE
