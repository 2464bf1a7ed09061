#include "fbmq/brownian_exact.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fbmq/asymptotics.hpp"
#include "fbmq/errors.hpp"
#include "fbmq/gaussian_paths.hpp"
#include "fbmq/logging.hpp"
#include "fbmq/parallel.hpp"
#include "fbmq/workload.hpp"
#include "internal_util.hpp"

namespace fbmq {
namespace {

constexpr double kGuardExponent = 700.0;  // exp() overflows near 709

double checked_probability(double p, const char* what) {
  // Allow float dust only; anything larger is a formula bug, not noise.
  if (!(p > -1e-9) || !(p < 1.0 + 1e-9)) {
    throw std::logic_error(std::string(what) + ": probability outside [0,1]");
  }
  return std::min(std::max(p, 0.0), 1.0);
}

}  // namespace

void BmTransientQuery::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("drain rate c must be positive and finite");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("elapsed time T must be positive and finite");
  }
  if (!(u >= 0.0) || !std::isfinite(u) || !(omega >= 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("levels u and omega must be finite and nonnegative");
  }
}

double stationary_tail(double c, double u) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("drain rate c must be positive and finite");
  }
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw std::invalid_argument("level u must be finite and nonnegative");
  }
  return std::exp(-2.0 * c * u);
}

double transient_exceed_given_level(const BmTransientQuery& q) {
  q.validate();
  const double rt = std::sqrt(q.T);
  const double p = normal_cdf((q.u - q.omega - q.c * q.T) / rt) +
                   std::exp(-2.0 * q.c * q.omega) *
                       normal_cdf((q.c * q.T - q.omega - q.u) / rt);
  return checked_probability(p, "transient_exceed_given_level");
}

double transient_exceed_given_exceed(const BmTransientQuery& q) {
  q.validate();
  const double rt = std::sqrt(q.T);
  const double c = q.c, u = q.u, w = q.omega, T = q.T;
  const double p = -std::exp(2.0 * u * c) * normal_cdf((-w - u - c * T) / rt) +
                   std::exp(-2.0 * c * (w - u)) * normal_cdf((w - u - c * T) / rt) +
                   normal_cdf((u - w - c * T) / rt) +
                   std::exp(-2.0 * c * w) * normal_cdf((c * T - w - u) / rt);
  return checked_probability(p, "transient_exceed_given_exceed");
}

double sample_conditional_initial(double c, double u, Rng& rng) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("drain rate c must be positive and finite");
  }
  if (!(u >= 0.0) || !std::isfinite(u)) {
    throw std::invalid_argument("level u must be finite and nonnegative");
  }
  std::exponential_distribution<double> overshoot(2.0 * c);
  return u + overshoot(rng);
}

bool CConstantSpec::w_is_infinite() const noexcept {
  return std::isinf(w) && w > 0.0;
}

void CConstantSpec::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("drain rate c must be positive and finite");
  }
  if (!(t1 >= 0.0) || !std::isfinite(t1) || !std::isfinite(t2) || !(t2 > t1)) {
    throw std::invalid_argument("window must satisfy 0 <= t1 < t2 (finite)");
  }
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("sojourn duration x must be finite and nonnegative");
  }
  if (std::isnan(w) || (std::isinf(w) && w < 0.0)) {
    throw std::invalid_argument("w must be a real or the +infinity sentinel");
  }
}

namespace detail {

std::optional<double> c_replicate_value(double y_star, double w, double c) {
  const double capped = std::min(y_star, w);  // min(Y*, +inf) = Y*
  const double exponent = 2.0 * c * capped;
  if (exponent > kGuardExponent) return std::nullopt;
  return std::exp(exponent);  // exp(-inf) = 0 covers the empty-sojourn sentinel
}

}  // namespace detail

CConstantEstimate estimate_C(const CConstantSpec& spec, double step, std::int64_t reps,
                             std::uint64_t seed, int workers) {
  spec.validate();
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("step must be positive and finite");
  }

  CConstantEstimate out;
  out.spec = spec;
  out.mc.seed = seed;
  out.mc.step = step;

  // Inner probability is identically zero once the duration cannot fit.
  if (spec.x >= spec.t2 - spec.t1) {
    out.mc.value = 0.0;
    out.mc.std_error = 0.0;
    out.mc.reps = reps;
    out.mc.notes.push_back("window cannot hold the requested sojourn; exact zero");
    return out;
  }

  // Path grid [0, t2) with window slice [t1, t2); the drifted path must start
  // at time 0 because the window values depend on the whole history.
  const std::size_t count = static_cast<std::size_t>(
      detail::snapped_ceil(spec.t2 / step));
  const std::size_t lo = static_cast<std::size_t>(detail::snapped_ceil(spec.t1 / step));
  if (count > kMaxGridPoints) {
    throw ResourceError("window grid exceeds the configured point cap");
  }
  if (lo >= count) throw std::invalid_argument("window [t1,t2) holds no grid points");

  const HurstParam brownian(0.5);
  std::vector<double> values(static_cast<std::size_t>(reps));

  struct State {
    FbmSampler sampler;
    std::vector<double> path;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(workers),
      [&](unsigned) {
        return State{FbmSampler(0, count - 1, step, brownian), std::vector<double>(count)};
      },
      [&](std::uint64_t rep, State& st) {
        Rng rng = substream(seed, rep);
        st.sampler.sample(rng, st.path);
        for (std::size_t j = 0; j < count; ++j) {
          st.path[j] -= spec.c * (static_cast<double>(j) * step);
        }
        const ExtendedLevel y_star = sojourn_level(
            std::span<const double>(st.path).subspan(lo, count - lo), step, spec.x);
        const auto v = detail::c_replicate_value(y_star.value, spec.w, spec.c);
        values[rep] = v ? *v : std::numeric_limits<double>::quiet_NaN();
      });

  const auto stats = detail::reduce_mean_se(values);
  out.mc.value = stats.mean;
  out.mc.std_error = stats.se;
  out.mc.reps = stats.n;
  const std::int64_t dropped = reps - stats.n;
  if (dropped > 0) {
    log_warning("estimate_C dropped " + std::to_string(dropped) +
                " replicate(s) with exponent above the overflow guard");
    out.mc.notes.push_back("dropped " + std::to_string(dropped) +
                           " overflow-guarded replicate(s) of " + std::to_string(reps));
  }
  out.mc.notes.push_back("grid sojourn level; discrete windows bias the level low");
  return out;
}

double prop1_approx(double c, double w, const CConstantEstimate& c_estimate) {
  if (!std::isfinite(w)) {
    throw std::invalid_argument("prop1_approx requires a finite w");
  }
  if (c_estimate.spec.c != c || c_estimate.spec.w != w) {
    throw std::invalid_argument("window-constant estimate does not match (c, w)");
  }
  return std::exp(-2.0 * c * w) * c_estimate.mc.value;
}

double prop2_approx(double c, double a, double u, double omega,
                    const CConstantEstimate* c_inf_estimate) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("drain rate c must be positive and finite");
  }
  if (!std::isfinite(a) || a <= -1.0 || a == 0.0) {
    throw std::invalid_argument("proportional shift requires a > -1, a != 0");
  }
  if (a < 0.0) return 1.0;
  if (c_inf_estimate == nullptr) {
    throw std::invalid_argument("a > 0 requires a window-constant estimate at w = +inf");
  }
  if (c_inf_estimate->spec.c != c || !c_inf_estimate->spec.w_is_infinite()) {
    throw std::invalid_argument("window-constant estimate does not match (c, w = +inf)");
  }
  return std::exp(-2.0 * c * (omega - u)) * c_inf_estimate->mc.value;
}

}  // namespace fbmq
