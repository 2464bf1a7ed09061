#pragma once

#include "fbmq/berman.hpp"
#include "fbmq/hurst.hpp"

namespace fbmq {

// Deterministic evaluation of the asymptotic formulas: model constants,
// Gaussian tails, the sojourn-probability approximations, the level-shift
// limit, and the proportional-shift envelope. Nothing here simulates; these
// functions consume Monte Carlo constants and refuse mismatched parameters.

// Standard normal distribution function and its tail, via erfc
// (relative accuracy ~1e-14 for |z| <= 8).
double normal_cdf(double z);
double normal_tail(double z);

// Constants attached to (H, c, u): the tail amplitude A, the curvature
// constant B, the critical time scale t*, the local scale Delta(u), and the
// window scale v(u) = u * Delta(u). For H = 1/2: A = 2 sqrt(c), t* = 1/c, and
// v(u) = 1/(2 c^2) independent of u.
struct DerivedConstants {
  double A = 0.0;
  double B_const = 0.0;
  double t_star = 0.0;
  double delta_u = 0.0;
  double v_u = 0.0;
};

DerivedConstants derived_constants(HurstParam hurst, double c, double u);

// Scaled observation windows: T_i(u) = script_ti * v(u), with sojourn
// thresholds x (first window) and y (second window) in v(u) units.
struct SojournWindows {
  double script_t1 = 1.0;
  double script_t2 = 0.0;
  double script_t3 = 1.0;
  double x = 0.0;
  double y = 0.0;

  void validate() const;
};

// Threshold-shift regimes for omega(u):
//   SmallBm   omega = u + w              (Brownian, additive shift)
//   LargeBm   omega = (1+a) u            (Brownian, proportional shift)
//   SmallFbm  omega = u + lambda/(A^2 (1-H)) * u^{2H-1}
//   LargeFbm  omega = (1+a) u
enum class RegimeKind { kSmallBm, kLargeBm, kSmallFbm, kLargeFbm };

const char* regime_kind_name(RegimeKind kind);

struct FluctuationRegime {
  RegimeKind kind = RegimeKind::kSmallBm;
  double value = 0.0;  // w, a, lambda, or a depending on kind

  static FluctuationRegime small_bm(double w) { return {RegimeKind::kSmallBm, w}; }
  static FluctuationRegime large_bm(double a) { return {RegimeKind::kLargeBm, a}; }
  static FluctuationRegime small_fbm(double lambda) {
    return {RegimeKind::kSmallFbm, lambda};
  }
  static FluctuationRegime large_fbm(double a) { return {RegimeKind::kLargeFbm, a}; }

  bool is_large() const noexcept {
    return kind == RegimeKind::kLargeBm || kind == RegimeKind::kLargeFbm;
  }
  void validate() const;  // finite value; large kinds need a > -1, a != 0
};

// tau = lambda / (A^2 (1-H)); defined for the additive-shift regimes
// (SmallBm uses w directly: tau such that the shift is w at every u).
double regime_tau(const FluctuationRegime& regime, HurstParam hurst, double c);

// a_tilde = (1+a)^{(1-2H)/H}; defined for the proportional-shift regimes.
double regime_a_tilde(const FluctuationRegime& regime, HurstParam hurst);

// omega(u) for the regime.
double threshold_level(const FluctuationRegime& regime, HurstParam hurst, double c,
                       double u);

// Marginal sojourn-probability approximation:
//   pickands * bar_x * sqrt(2 pi) (A B)^{-1/2} / (u^{1-H} Delta(u)) * Psi(A u^{1-H}).
// bar_x must be a one-window constant matching (H, script_t1, x).
double marginal_sojourn_asymptotic(HurstParam hurst, double c, double u,
                                   const SojournWindows& windows,
                                   const ConstantEstimate& pickands,
                                   const ConstantEstimate& bar_x);

// Joint version: same prefactor with the two-window constant (matching
// (H, script_t1, lambda, script_t2, script_t3, x, y)) in place of bar_x.
double joint_sojourn_asymptotic(HurstParam hurst, double c, double u,
                                const SojournWindows& windows, double lambda,
                                const ConstantEstimate& pickands,
                                const ConstantEstimate& bar_xy);

// Limiting conditional probability for the additive-shift regime: the ratio
// of the two-window constant to the one-window constant. Throws on a zero
// denominator (possible only when x >= script_t1).
double thm1_limit(const ConstantEstimate& bar_xy, const ConstantEstimate& bar_x);

// Proportional-shift envelope at level u:
//   decay    exp(-A^2 ((1+a)^{2-2H} - 1)/2 * u^{2-2H})   (computed in log space)
//   log_rate the u-free coefficient -A^2 ((1+a)^{2-2H} - 1)/2
//   lower    a_tilde^{1-H} * bar_joint_lower / bar_x
//   upper    a_tilde^{1-H} * bar_ay_upper / bar_x
// For a in (-1,0) the conditional probability tends to 1: every field is 1
// and the estimates are ignored. a <= -1 and a = 0 are rejected.
struct Thm3Envelope {
  double decay = 1.0;
  double lower = 1.0;
  double upper = 1.0;
  double log_rate = 0.0;
};

struct Thm3Estimates {
  const ConstantEstimate* bar_x = nullptr;            // one-window at (script_t1, x)
  const ConstantEstimate* bar_ay_upper = nullptr;     // one-window at (atilde*(t3-t2), atilde*y)
  const ConstantEstimate* bar_joint_lower = nullptr;  // two-window at atilde-scaled spec
};

Thm3Envelope thm3_envelope(HurstParam hurst, double c, double u, double a,
                           const SojournWindows& windows, const Thm3Estimates& estimates);

}  // namespace fbmq
