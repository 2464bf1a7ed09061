#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "fbmq/mc_estimate.hpp"
#include "fbmq/rng.hpp"

namespace fbmq {

// Closed forms for the Brownian (H = 1/2) queue with drain rate c, plus the
// window constant that scales the small/large-fluctuation approximations of
// the conditional sojourn probabilities.

// Transient query: condition at time 0 (level u), look at time T (level omega).
struct BmTransientQuery {
  double c = 1.0;      // drain rate, > 0
  double u = 0.0;      // conditioning level at time 0, >= 0
  double omega = 0.0;  // target level at time T, >= 0
  double T = 1.0;      // elapsed time, > 0

  void validate() const;
};

// P(Q(0) > u) = exp(-2 c u) for the stationary Brownian queue.
double stationary_tail(double c, double u);

// P(Q(T) > omega | Q(0) = u). The reflection term uses
// Phi((cT - omega - u)/sqrt(T)); with the sign flipped the T -> 0 and
// T -> infinity limits both fail, so that variant is rejected by the tests.
double transient_exceed_given_level(const BmTransientQuery& q);

// P(Q(T) > omega | Q(0) > u), integrating the formula above against the
// conditional start law u + Exp(2c).
double transient_exceed_given_exceed(const BmTransientQuery& q);

// Exact draw from the law of Q(0) given Q(0) > u: u plus an Exp(2c) overshoot.
double sample_conditional_initial(double c, double u, Rng& rng);

// Window constant spec: the exponentially weighted sojourn integral
//   2c * Integral_{-inf}^{w} e^{2cy} P(time{t in [t1,t2]: B(t) - ct > y} > x) dy,
// which reduces exactly to E[exp(2c * min(Y*, w))] where Y* is the sojourn
// level of the drifted path on the window at duration x. w = +infinity is an
// explicit sentinel (use infinite_w()).
struct CConstantSpec {
  double t1 = 0.0;  // window start, >= 0
  double t2 = 1.0;  // window end, > t1
  double x = 0.0;   // sojourn duration threshold, >= 0
  double w = std::numeric_limits<double>::infinity();
  double c = 1.0;   // drain rate, > 0

  static constexpr double infinite_w() noexcept {
    return std::numeric_limits<double>::infinity();
  }
  bool w_is_infinite() const noexcept;
  void validate() const;
};

struct CConstantEstimate {
  CConstantSpec spec;
  MonteCarloEstimate mc;
};

// Monte Carlo estimate of the window constant. x >= t2 - t1 short-circuits to
// exactly 0 with zero error. Replicates whose exponent 2c*min(Y*,w) exceeds
// 700 are dropped (counted and noted); their probability is Gaussian-tail
// small for every sane parameter set.
CConstantEstimate estimate_C(const CConstantSpec& spec, double step, std::int64_t reps,
                             std::uint64_t seed, int workers = 1);

// Small-fluctuation approximation of the conditional sojourn probability:
// exp(-2cw) * C(t1,t2,x;w). The estimate must carry matching (c, w).
double prop1_approx(double c, double w, const CConstantEstimate& c_estimate);

// Large-fluctuation approximation at omega = (1+a)u:
//   a in (-1,0) -> 1;  a > 0 -> exp(-2c(omega-u)) * C(t1,t2,x;inf).
// a <= -1 and a = 0 are rejected. For a > 0 the estimate must carry (c, w=inf).
double prop2_approx(double c, double a, double u, double omega,
                    const CConstantEstimate* c_inf_estimate);

namespace detail {
// Replicate value with the overflow guard applied; nullopt = dropped.
std::optional<double> c_replicate_value(double y_star, double w, double c);
}  // namespace detail

}  // namespace fbmq
