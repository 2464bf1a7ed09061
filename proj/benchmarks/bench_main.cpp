// Microbenchmarks for the hot paths: path sampling (spectral vs the Brownian
// shortcut), the workload transforms, order-statistic sojourn queries, and
// the per-replicate constant estimator kernels.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fbmq/berman.hpp"
#include "fbmq/gaussian_paths.hpp"
#include "fbmq/rng.hpp"
#include "fbmq/workload.hpp"

namespace {

void BM_SampleFbm(benchmark::State& state) {
  const double hurst = static_cast<double>(state.range(0)) / 100.0;
  const std::size_t points = static_cast<std::size_t>(state.range(1));
  fbmq::FbmSampler sampler(0, points, 1.0 / 256.0, fbmq::HurstParam(hurst));
  std::vector<double> out(sampler.point_count());
  auto rng = fbmq::substream(1, 0);
  for (auto _ : state) {
    sampler.sample(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(points));
}
BENCHMARK(BM_SampleFbm)
    ->Args({50, 1024})
    ->Args({70, 1024})
    ->Args({30, 1024})
    ->Args({50, 16384})
    ->Args({70, 16384});

void BM_WTransform(benchmark::State& state) {
  const std::size_t points = static_cast<std::size_t>(state.range(0));
  const fbmq::TimeGrid grid{-(static_cast<double>(points / 2) / 128.0), 1.0 / 128.0, points + 1};
  fbmq::FbmSampler sampler(points / 2, points - points / 2, 1.0 / 128.0,
                           fbmq::HurstParam(0.7));
  std::vector<double> out(sampler.point_count());
  auto rng = fbmq::substream(2, 0);
  for (auto _ : state) {
    sampler.sample(rng, out);
    fbmq::w_transform(grid, fbmq::HurstParam(0.7), out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_WTransform)->Arg(2048)->Arg(8192);

void BM_StationaryWindow(benchmark::State& state) {
  const std::size_t lookahead = static_cast<std::size_t>(state.range(0));
  const double step = 1.0 / 128.0;
  const fbmq::TimeGrid grid{0.0, step, 128 + lookahead + 1};
  auto rng = fbmq::substream(3, 0);
  const auto path = fbmq::sample_fbm(grid, fbmq::HurstParam(0.5), rng);
  const fbmq::QueueParams params{fbmq::HurstParam(0.5), 1.0};
  for (auto _ : state) {
    auto window = fbmq::stationary_window_from_driver(params, path, 1.0, lookahead * step);
    benchmark::DoNotOptimize(window.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lookahead + 128));
}
BENCHMARK(BM_StationaryWindow)->Arg(512)->Arg(4096);

void BM_SojournLevel(benchmark::State& state) {
  const std::size_t points = static_cast<std::size_t>(state.range(0));
  const fbmq::TimeGrid grid{0.0, 1.0 / 256.0, points};
  auto rng = fbmq::substream(4, 0);
  const auto path = fbmq::sample_fbm(grid, fbmq::HurstParam(0.5), rng);
  for (auto _ : state) {
    const auto level = fbmq::sojourn_level(path.values, 1.0 / 256.0, 0.25);
    benchmark::DoNotOptimize(level.value);
  }
}
BENCHMARK(BM_SojournLevel)->Arg(256)->Arg(4096);

void BM_RatioMaxOverSum(benchmark::State& state) {
  const std::size_t points = static_cast<std::size_t>(state.range(0));
  const double step = 1.0 / 64.0;
  const std::size_t half = points / 2;
  const fbmq::TimeGrid grid{-static_cast<double>(half) * step, step, points + 1};
  fbmq::FbmSampler sampler(half, points - half, step, fbmq::HurstParam(0.5));
  std::vector<double> field(sampler.point_count());
  auto rng = fbmq::substream(5, 0);
  sampler.sample(rng, field);
  fbmq::w_transform(grid, fbmq::HurstParam(0.5), field);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbmq::ratio_max_over_sum(field, step));
  }
}
BENCHMARK(BM_RatioMaxOverSum)->Arg(2048)->Arg(8192);

void BM_BarJointReplicate(benchmark::State& state) {
  fbmq::BermanSpec spec;
  spec.hurst = fbmq::HurstParam(0.7);
  spec.t1 = 1.0;
  spec.lambda = 0.5;
  spec.t2 = 0.5;
  spec.t3 = 1.5;
  spec.x = 0.2;
  spec.y = 0.3;
  const fbmq::TimeGrid grid{0.0, 0.01, 151};
  auto rng = fbmq::substream(6, 0);
  const auto w = fbmq::sample_w_path(grid, spec.hurst, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fbmq::bar_joint_replicate(w.values, grid, spec));
  }
}
BENCHMARK(BM_BarJointReplicate);

}  // namespace

BENCHMARK_MAIN();
