#include "fbmq/berman.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "fbmq/errors.hpp"
#include "fbmq/gaussian_paths.hpp"
#include "fbmq/parallel.hpp"
#include "fbmq/workload.hpp"
#include "internal_util.hpp"

namespace fbmq {
namespace {

using detail::reduce_mean_se;
using detail::snapped_ceil;

void check_mc_args(double step, std::int64_t reps) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("step must be positive and finite");
  }
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
}

std::size_t checked_count(double span, double step, const char* what) {
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
  const std::int64_t n = snapped_ceil(span / step);
  if (n < 1) throw std::invalid_argument(std::string(what) + " holds no grid points");
  if (static_cast<std::size_t>(n) > kMaxGridPoints) {
    throw ResourceError("grid exceeds the configured point cap");
  }
  return static_cast<std::size_t>(n);
}

// Half-open window [left, right) as grid index range on a grid starting at 0.
struct IndexWindow {
  std::size_t lo;
  std::size_t hi;  // one past the end
};

IndexWindow window_indices(double left, double right, double step, std::size_t count) {
  const std::int64_t lo = snapped_ceil(left / step);
  const std::int64_t hi = snapped_ceil(right / step);
  if (lo < 0 || hi < lo || static_cast<std::size_t>(hi) > count) {
    throw std::invalid_argument("window not covered by the sampled grid");
  }
  return IndexWindow{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

double window_level(std::span<const double> values, const IndexWindow& win, double step,
                    double duration) {
  return sojourn_level(values.subspan(win.lo, win.hi - win.lo), step, duration).value;
}

MonteCarloEstimate finish(std::vector<double>& values, std::uint64_t seed, double step) {
  const auto stats = reduce_mean_se(values);
  MonteCarloEstimate mc;
  mc.value = stats.mean;
  mc.std_error = stats.se;
  mc.reps = stats.n;
  mc.seed = seed;
  mc.step = step;
  return mc;
}

// Shared driver: one W path per replicate on [0, span) and a per-replicate
// scalar kernel.
template <class Kernel>
MonteCarloEstimate w_path_estimate(HurstParam hurst, double span, double step,
                                   std::int64_t reps, std::uint64_t seed, int workers,
                                   Kernel&& kernel) {
  const std::size_t count = checked_count(span, step, "span");
  std::vector<double> values(static_cast<std::size_t>(reps));
  struct State {
    FbmSampler sampler;
    std::vector<double> path;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(workers),
      [&](unsigned) {
        return State{FbmSampler(0, count - 1, step, hurst), std::vector<double>(count)};
      },
      [&](std::uint64_t rep, State& st) {
        Rng rng = substream(seed, rep);
        st.sampler.sample(rng, st.path);
        const double h2 = 2.0 * hurst.value();
        const double root2 = std::sqrt(2.0);
        for (std::size_t j = 0; j < count; ++j) {
          const double t = static_cast<double>(j) * step;
          st.path[j] = root2 * st.path[j] - std::pow(t, h2);
        }
        values[rep] = kernel(std::span<const double>(st.path));
      });
  return finish(values, seed, step);
}

}  // namespace

void BermanSpec::validate() const {
  if (!(t1 > 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("t1 must be positive and finite");
  }
  if (!(t2 >= 0.0) || !std::isfinite(t2) || !std::isfinite(t3) || !(t3 > t2)) {
    throw std::invalid_argument("second window must satisfy 0 <= t2 < t3 (finite)");
  }
  if (!(x >= 0.0) || !std::isfinite(x) || !(y >= 0.0) || !std::isfinite(y)) {
    throw std::invalid_argument("sojourn durations x and y must be finite and nonnegative");
  }
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite");
  }
}

bool BermanSpec::zero_region() const noexcept { return x >= t1 || y >= t3 - t2; }

const char* constant_kind_name(ConstantKind kind) {
  switch (kind) {
    case ConstantKind::kPickands: return "pickands";
    case ConstantKind::kPickandsAlphaTwo: return "pickands_alpha2";
    case ConstantKind::kSupExp: return "sup_exp";
    case ConstantKind::kBarSingle: return "bar_single";
    case ConstantKind::kBarJoint: return "bar_joint";
    case ConstantKind::kFiniteHorizonJoint: return "finite_horizon_joint";
  }
  throw std::logic_error("unknown constant kind");
}

namespace {

ConstantKind kind_from_name(const std::string& name) {
  for (ConstantKind k :
       {ConstantKind::kPickands, ConstantKind::kPickandsAlphaTwo, ConstantKind::kSupExp,
        ConstantKind::kBarSingle, ConstantKind::kBarJoint,
        ConstantKind::kFiniteHorizonJoint}) {
    if (name == constant_kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown constant kind: " + name);
}

}  // namespace

std::string to_json_string(const ConstantEstimate& e) {
  nlohmann::json j;
  j["constant_kind"] = constant_kind_name(e.kind);
  j["params"] = {{"hurst", e.hurst}, {"span", e.span}, {"t1", e.t1},
                 {"lambda", e.lambda}, {"t2", e.t2},   {"t3", e.t3},
                 {"x", e.x},           {"y", e.y}};
  j["value"] = e.mc.value;
  j["std_error"] = e.mc.std_error;
  j["reps"] = e.mc.reps;
  j["step"] = e.mc.step;
  j["seed"] = e.mc.seed;
  j["notes"] = e.mc.notes;
  return j.dump(2);
}

ConstantEstimate constant_estimate_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ConstantEstimate e;
  e.kind = kind_from_name(j.at("constant_kind").get<std::string>());
  const auto& p = j.at("params");
  e.hurst = p.at("hurst").get<double>();
  e.span = p.at("span").get<double>();
  e.t1 = p.at("t1").get<double>();
  e.lambda = p.at("lambda").get<double>();
  e.t2 = p.at("t2").get<double>();
  e.t3 = p.at("t3").get<double>();
  e.x = p.at("x").get<double>();
  e.y = p.at("y").get<double>();
  e.mc.value = j.at("value").get<double>();
  e.mc.std_error = j.at("std_error").get<double>();
  e.mc.reps = j.at("reps").get<std::int64_t>();
  e.mc.step = j.at("step").get<double>();
  e.mc.seed = j.at("seed").get<std::uint64_t>();
  e.mc.notes = j.at("notes").get<std::vector<std::string>>();
  return e;
}

double default_constant_step(double t2, double t3) {
  if (!(t3 > t2)) throw std::invalid_argument("t3 must exceed t2");
  return std::min(0.01, (t3 - t2) / 50.0);
}

double ratio_max_over_sum(std::span<const double> field_values, double step) {
  if (field_values.empty()) throw std::invalid_argument("empty field");
  const double fmax = *std::max_element(field_values.begin(), field_values.end());
  double denom = 0.0;
  for (double f : field_values) {
    const double e = f - fmax;
    if (e >= -746.0) denom += std::exp(e);  // below that exp underflows to 0 exactly
  }
  return 1.0 / (step * denom);
}

double sup_exp_replicate(std::span<const double> field, std::size_t zero_index) {
  const std::size_t n = zero_index;
  if (field.size() != 2 * n + 1 || n == 0) {
    throw std::invalid_argument("field must hold 2n+1 points with zero_index n");
  }
  // Prefix sums of e^{F}; every window [m, m+n] contains the pinned zero point
  // (F = 0), so window sums stay >= 1 and the prefix differences are stable.
  std::vector<double> prefix(field.size() + 1, 0.0);
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double f = field[j];
    prefix[j + 1] = prefix[j] + (f >= -746.0 ? std::exp(f) : 0.0);
  }
  // Sliding maxima over the n+1 windows [m, m+n], m = 0..n.
  std::deque<std::size_t> maxima;
  auto push = [&](std::size_t j) {
    while (!maxima.empty() && field[maxima.back()] <= field[j]) maxima.pop_back();
    maxima.push_back(j);
  };
  for (std::size_t j = 0; j < n; ++j) push(j);
  double total = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    push(m + n);
    if (maxima.front() + 1 <= m) maxima.pop_front();
    const double fmax = field[maxima.front()];
    const double window_sum = prefix[m + n + 1] - prefix[m];
    total += std::exp(fmax) / window_sum;
  }
  return total;
}

double bar_single_replicate(std::span<const double> w_values, const TimeGrid& grid,
                            double t1, double x) {
  grid.validate();
  if (grid.start != 0.0) throw std::invalid_argument("W grid must start at 0");
  if (w_values.size() != grid.count) {
    throw std::invalid_argument("value count does not match grid");
  }
  const IndexWindow win = window_indices(0.0, t1, grid.step, grid.count);
  const double z1 = window_level(w_values, win, grid.step, x);
  return std::exp(z1);  // exp(-inf) = 0
}

double bar_joint_replicate(std::span<const double> w_values, const TimeGrid& grid,
                           const BermanSpec& spec) {
  grid.validate();
  spec.validate();
  if (grid.start != 0.0) throw std::invalid_argument("W grid must start at 0");
  if (w_values.size() != grid.count) {
    throw std::invalid_argument("value count does not match grid");
  }
  const IndexWindow win1 = window_indices(0.0, spec.t1, grid.step, grid.count);
  const IndexWindow win2 = window_indices(spec.t2, spec.t3, grid.step, grid.count);
  const double z1 = window_level(w_values, win1, grid.step, spec.x);
  const double z2 = window_level(w_values, win2, grid.step, spec.y);
  return std::exp(std::min(z1, z2 - spec.lambda));
}

ConstantEstimate estimate_pickands(HurstParam hurst, double span, double step,
                                   std::int64_t reps, std::uint64_t seed, int workers) {
  check_mc_args(step, reps);
  const std::size_t half = checked_count(span / 2.0, step, "span/2");
  const std::size_t count = 2 * half + 1;
  if (count > kMaxGridPoints) throw ResourceError("grid exceeds the configured point cap");

  std::vector<double> values(static_cast<std::size_t>(reps));
  struct State {
    FbmSampler sampler;
    std::vector<double> path;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(workers),
      [&](unsigned) {
        return State{FbmSampler(half, half, step, hurst), std::vector<double>(count)};
      },
      [&](std::uint64_t rep, State& st) {
        Rng rng = substream(seed, rep);
        st.sampler.sample(rng, st.path);
        const double h2 = 2.0 * hurst.value();
        const double root2 = std::sqrt(2.0);
        for (std::size_t j = 0; j < count; ++j) {
          const double t = (static_cast<double>(j) - static_cast<double>(half)) * step;
          st.path[j] = root2 * st.path[j] - std::pow(std::abs(t), h2);
        }
        values[rep] = ratio_max_over_sum(st.path, step);
      });

  ConstantEstimate out;
  out.kind = ConstantKind::kPickands;
  out.hurst = hurst.value();
  out.span = span;
  out.mc = finish(values, seed, step);
  out.mc.notes.push_back("ratio-form estimator; finite window biases high, grid biases low");
  return out;
}

ConstantEstimate estimate_pickands_alpha_two(double span, double step, std::int64_t reps,
                                             std::uint64_t seed, int workers) {
  check_mc_args(step, reps);
  const std::size_t half = checked_count(span / 2.0, step, "span/2");
  const std::size_t count = 2 * half + 1;

  std::vector<double> values(static_cast<std::size_t>(reps));
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(workers),
      [&](unsigned) { return std::vector<double>(count); },
      [&](std::uint64_t rep, std::vector<double>& field) {
        Rng rng = substream(seed, rep);
        std::normal_distribution<double> normal;
        const double n = normal(rng);
        const double root2 = std::sqrt(2.0);
        for (std::size_t j = 0; j < count; ++j) {
          const double t = (static_cast<double>(j) - static_cast<double>(half)) * step;
          field[j] = root2 * t * n - t * t;
        }
        values[rep] = ratio_max_over_sum(field, step);
      });

  ConstantEstimate out;
  out.kind = ConstantKind::kPickandsAlphaTwo;
  out.hurst = 1.0;
  out.span = span;
  out.mc = finish(values, seed, step);
  out.mc.notes.push_back("degenerate-field validation path (variance |t|^2)");
  return out;
}

ConstantEstimate estimate_sup_exp(HurstParam hurst, double span, double step,
                                  std::int64_t reps, std::uint64_t seed, int workers) {
  check_mc_args(step, reps);
  const std::size_t n = checked_count(span, step, "span") - 1;
  if (n == 0) throw std::invalid_argument("span must hold at least two grid points");
  const std::size_t count = 2 * n + 1;
  if (count > kMaxGridPoints) throw ResourceError("grid exceeds the configured point cap");

  std::vector<double> values(static_cast<std::size_t>(reps));
  struct State {
    FbmSampler sampler;
    std::vector<double> path;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(workers),
      [&](unsigned) {
        return State{FbmSampler(n, n, step, hurst), std::vector<double>(count)};
      },
      [&](std::uint64_t rep, State& st) {
        Rng rng = substream(seed, rep);
        st.sampler.sample(rng, st.path);
        const double h2 = 2.0 * hurst.value();
        const double root2 = std::sqrt(2.0);
        for (std::size_t j = 0; j < count; ++j) {
          const double t = (static_cast<double>(j) - static_cast<double>(n)) * step;
          st.path[j] = root2 * st.path[j] - std::pow(std::abs(t), h2);
        }
        values[rep] = sup_exp_replicate(st.path, n);
      });

  ConstantEstimate out;
  out.kind = ConstantKind::kSupExp;
  out.hurst = hurst.value();
  out.span = span;
  out.mc = finish(values, seed, step);
  out.mc.notes.push_back("tilt-identity estimator of the grid functional (unbiased)");
  return out;
}

ConstantEstimate estimate_sup_exp_naive(HurstParam hurst, double span, double step,
                                        std::int64_t reps, std::uint64_t seed, int workers) {
  check_mc_args(step, reps);
  MonteCarloEstimate mc = w_path_estimate(
      hurst, span, step, reps, seed, workers, [](std::span<const double> w) {
        return std::exp(*std::max_element(w.begin(), w.end()));
      });
  ConstantEstimate out;
  out.kind = ConstantKind::kSupExp;
  out.hurst = hurst.value();
  out.span = span;
  out.mc = std::move(mc);
  out.mc.notes.push_back("plain mean of exp(grid max); heavy-tailed, small spans only");
  return out;
}

ConstantEstimate estimate_bar_single(HurstParam hurst, double t1, double x, double step,
                                     std::int64_t reps, std::uint64_t seed, int workers) {
  check_mc_args(step, reps);
  if (!(t1 > 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("t1 must be positive and finite");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("x must be finite and nonnegative");
  }

  ConstantEstimate out;
  out.kind = ConstantKind::kBarSingle;
  out.hurst = hurst.value();
  out.t1 = t1;
  out.x = x;
  if (x >= t1) {
    out.mc.value = 0.0;
    out.mc.std_error = 0.0;
    out.mc.reps = reps;
    out.mc.seed = seed;
    out.mc.step = step;
    out.mc.notes.push_back("sojourn cannot exceed the window length; exact zero");
    return out;
  }
  const TimeGrid grid{0.0, step, checked_count(t1, step, "t1")};
  out.mc = w_path_estimate(hurst, t1, step, reps, seed, workers,
                           [&](std::span<const double> w) {
                             return bar_single_replicate(w, grid, t1, x);
                           });
  return out;
}

ConstantEstimate estimate_bar_joint(const BermanSpec& spec, double step, std::int64_t reps,
                                    std::uint64_t seed, int workers) {
  spec.validate();
  check_mc_args(step, reps);

  ConstantEstimate out;
  out.kind = ConstantKind::kBarJoint;
  out.hurst = spec.hurst.value();
  out.t1 = spec.t1;
  out.lambda = spec.lambda;
  out.t2 = spec.t2;
  out.t3 = spec.t3;
  out.x = spec.x;
  out.y = spec.y;
  if (spec.zero_region()) {
    out.mc.value = 0.0;
    out.mc.std_error = 0.0;
    out.mc.reps = reps;
    out.mc.seed = seed;
    out.mc.step = step;
    out.mc.notes.push_back("a sojourn cannot exceed its window length; exact zero");
    return out;
  }
  const double span = std::max(spec.t1, spec.t3);
  const TimeGrid grid{0.0, step, checked_count(span, step, "window span")};
  out.mc = w_path_estimate(spec.hurst, span, step, reps, seed, workers,
                           [&](std::span<const double> w) {
                             return bar_joint_replicate(w, grid, spec);
                           });
  return out;
}

ConstantEstimate estimate_finite_horizon_joint(const BermanSpec& spec, double span,
                                               double step, std::int64_t reps,
                                               std::uint64_t seed, int workers) {
  spec.validate();
  check_mc_args(step, reps);
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw std::invalid_argument("span must be positive and finite");
  }

  ConstantEstimate out;
  out.kind = ConstantKind::kFiniteHorizonJoint;
  out.hurst = spec.hurst.value();
  out.span = span;
  out.t1 = spec.t1;
  out.lambda = spec.lambda;
  out.t2 = spec.t2;
  out.t3 = spec.t3;
  out.x = spec.x;
  out.y = spec.y;
  out.mc.seed = seed;
  out.mc.step = step;
  if (spec.zero_region()) {
    out.mc.value = 0.0;
    out.mc.std_error = 0.0;
    out.mc.reps = reps;
    out.mc.notes.push_back("a sojourn cannot exceed its window length; exact zero");
    return out;
  }

  // The defining expectation factorizes over the two independent fields, so
  // the estimator is the product of the factor means on disjoint substreams.
  const ConstantEstimate sup =
      estimate_sup_exp(spec.hurst, span, step, reps, derive_seed(seed, 1), workers);
  const ConstantEstimate bar =
      estimate_bar_joint(spec, step, reps, derive_seed(seed, 2), workers);
  const double v1 = sup.mc.value, s1 = sup.mc.std_error;
  const double v2 = bar.mc.value, s2 = bar.mc.std_error;
  out.mc.value = v1 * v2;
  out.mc.std_error = std::sqrt(v1 * v1 * s2 * s2 + v2 * v2 * s1 * s1 + s1 * s1 * s2 * s2);
  out.mc.reps = std::min(sup.mc.reps, bar.mc.reps);
  out.mc.notes.push_back("independent product: tilt-identity sup factor times window factor");
  return out;
}

ConstantEstimate estimate_finite_horizon_paired(const BermanSpec& spec, double span,
                                                double step, std::int64_t reps,
                                                std::uint64_t seed, int workers) {
  spec.validate();
  check_mc_args(step, reps);
  const std::size_t sup_count = checked_count(span, step, "span");
  const double window_span = std::max(spec.t1, spec.t3);
  const std::size_t win_count = checked_count(window_span, step, "window span");
  const TimeGrid win_grid{0.0, step, win_count};

  ConstantEstimate out;
  out.kind = ConstantKind::kFiniteHorizonJoint;
  out.hurst = spec.hurst.value();
  out.span = span;
  out.t1 = spec.t1;
  out.lambda = spec.lambda;
  out.t2 = spec.t2;
  out.t3 = spec.t3;
  out.x = spec.x;
  out.y = spec.y;
  out.mc.seed = seed;
  out.mc.step = step;
  if (spec.zero_region()) {
    out.mc.value = 0.0;
    out.mc.std_error = 0.0;
    out.mc.reps = reps;
    out.mc.notes.push_back("a sojourn cannot exceed its window length; exact zero");
    return out;
  }

  std::vector<double> values(static_cast<std::size_t>(reps));
  struct State {
    FbmSampler sup_sampler;
    FbmSampler win_sampler;
    std::vector<double> sup_path;
    std::vector<double> win_path;
  };
  const HurstParam hurst = spec.hurst;
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(workers),
      [&](unsigned) {
        return State{FbmSampler(0, sup_count - 1, step, hurst),
                     FbmSampler(0, win_count - 1, step, hurst),
                     std::vector<double>(sup_count), std::vector<double>(win_count)};
      },
      [&](std::uint64_t rep, State& st) {
        const double h2 = 2.0 * hurst.value();
        const double root2 = std::sqrt(2.0);
        Rng rng_sup = substream(seed, 2 * rep);
        st.sup_sampler.sample(rng_sup, st.sup_path);
        double vmax = 0.0;
        for (std::size_t j = 0; j < sup_count; ++j) {
          const double t = static_cast<double>(j) * step;
          const double w = root2 * st.sup_path[j] - std::pow(t, h2);
          vmax = std::max(vmax, w);
        }
        Rng rng_win = substream(seed, 2 * rep + 1);
        st.win_sampler.sample(rng_win, st.win_path);
        for (std::size_t j = 0; j < win_count; ++j) {
          const double t = static_cast<double>(j) * step;
          st.win_path[j] = root2 * st.win_path[j] - std::pow(t, h2);
        }
        values[rep] = std::exp(vmax) * bar_joint_replicate(st.win_path, win_grid, spec);
      });
  out.mc = finish(values, seed, step);
  out.mc.notes.push_back("paired replicate products; heavy-tailed, small spans only");
  return out;
}

}  // namespace fbmq
