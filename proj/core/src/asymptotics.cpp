#include "fbmq/asymptotics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "internal_util.hpp"

namespace fbmq {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Shared structural check: a one-window constant must have been estimated at
// exactly the (H, t1, x) the formula is being evaluated for.
void check_bar_single(const ConstantEstimate& est, HurstParam hurst, double t1,
                      double x, const char* what) {
  require(est.kind == ConstantKind::kBarSingle,
          std::string(what) + ": expected a one-window sojourn constant, got " +
              constant_kind_name(est.kind));
  require(detail::nearly_equal(est.hurst, hurst.value()),
          std::string(what) + ": Hurst parameter mismatch");
  require(detail::nearly_equal(est.t1, t1), std::string(what) + ": window-length mismatch");
  require(detail::nearly_equal(est.x, x), std::string(what) + ": sojourn-threshold mismatch");
}

void check_bar_joint(const ConstantEstimate& est, HurstParam hurst, double t1,
                     double lambda, double t2, double t3, double x, double y,
                     const char* what) {
  require(est.kind == ConstantKind::kBarJoint,
          std::string(what) + ": expected a two-window sojourn constant, got " +
              constant_kind_name(est.kind));
  require(detail::nearly_equal(est.hurst, hurst.value()),
          std::string(what) + ": Hurst parameter mismatch");
  require(detail::nearly_equal(est.t1, t1), std::string(what) + ": first-window mismatch");
  require(detail::nearly_equal(est.lambda, lambda),
          std::string(what) + ": drift-offset mismatch");
  require(detail::nearly_equal(est.t2, t2), std::string(what) + ": second-window start mismatch");
  require(detail::nearly_equal(est.t3, t3), std::string(what) + ": second-window end mismatch");
  require(detail::nearly_equal(est.x, x), std::string(what) + ": first-threshold mismatch");
  require(detail::nearly_equal(est.y, y), std::string(what) + ": second-threshold mismatch");
}

void check_pickands(const ConstantEstimate& est, HurstParam hurst, const char* what) {
  require(est.kind == ConstantKind::kPickands,
          std::string(what) + ": expected a Pickands-constant estimate, got " +
              constant_kind_name(est.kind));
  require(detail::nearly_equal(est.hurst, hurst.value()),
          std::string(what) + ": Hurst parameter mismatch");
}

// Common prefactor of the sojourn approximations:
//   sqrt(2 pi) (A B)^{-1/2} / (u^{1-H} Delta(u)) * Psi(A u^{1-H}).
double sojourn_prefactor(HurstParam hurst, double c, double u) {
  const DerivedConstants k = derived_constants(hurst, c, u);
  const double h = hurst.value();
  const double u_pow = std::pow(u, 1.0 - h);
  return std::sqrt(2.0 * kPi) / std::sqrt(k.A * k.B_const) / (u_pow * k.delta_u) *
         normal_tail(k.A * u_pow);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

DerivedConstants derived_constants(HurstParam hurst, double c, double u) {
  require(std::isfinite(c) && c > 0.0, "drain rate must be positive");
  require(std::isfinite(u) && u > 0.0, "level must be positive");
  const double h = hurst.value();
  const double ratio = h / (c * (1.0 - h));  // equals t* (argmax of t^H / (1 + c t))
  DerivedConstants k;
  k.t_star = ratio;
  k.A = std::pow(ratio, -h) / (1.0 - h);
  k.B_const = std::pow(ratio, -h - 2.0) * h;
  k.delta_u = std::pow(2.0, 1.0 / (2.0 * h)) * ratio * std::pow(k.A, -1.0 / h) *
              std::pow(u, -(1.0 - h) / h);
  k.v_u = u * k.delta_u;
  return k;
}

void SojournWindows::validate() const {
  require(std::isfinite(script_t1) && std::isfinite(script_t2) &&
              std::isfinite(script_t3) && std::isfinite(x) && std::isfinite(y),
          "window parameters must be finite");
  require(script_t1 > 0.0, "first window length must be positive");
  require(x >= 0.0 && x < script_t1,
          "first sojourn threshold must satisfy 0 <= x < first window length");
  require(script_t2 >= 0.0, "second window start must be nonnegative");
  require(script_t3 > script_t2, "second window must have positive length");
  require(y >= 0.0 && y < script_t3 - script_t2,
          "second sojourn threshold must satisfy 0 <= y < second window length");
}

const char* regime_kind_name(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::kSmallBm: return "small-bm";
    case RegimeKind::kLargeBm: return "large-bm";
    case RegimeKind::kSmallFbm: return "small-fbm";
    case RegimeKind::kLargeFbm: return "large-fbm";
  }
  return "unknown";
}

void FluctuationRegime::validate() const {
  require(std::isfinite(value), "regime parameter must be finite");
  if (is_large()) {
    require(value > -1.0, "proportional shift requires a > -1");
    require(value != 0.0, "proportional shift requires a != 0");
  }
}

double regime_tau(const FluctuationRegime& regime, HurstParam hurst, double c) {
  regime.validate();
  switch (regime.kind) {
    case RegimeKind::kSmallBm:
      return regime.value;  // shift is w itself (u^{2H-1} = 1 at H = 1/2)
    case RegimeKind::kSmallFbm: {
      const DerivedConstants k = derived_constants(hurst, c, 1.0);
      return regime.value / (k.A * k.A * (1.0 - hurst.value()));
    }
    default:
      throw std::invalid_argument("additive-shift scale requested for a proportional regime");
  }
}

double regime_a_tilde(const FluctuationRegime& regime, HurstParam hurst) {
  regime.validate();
  require(regime.is_large(), "a_tilde is defined for the proportional-shift regimes");
  const double h = hurst.value();
  return std::pow(1.0 + regime.value, (1.0 - 2.0 * h) / h);
}

double threshold_level(const FluctuationRegime& regime, HurstParam hurst, double c,
                       double u) {
  regime.validate();
  require(std::isfinite(u) && u > 0.0, "level must be positive");
  switch (regime.kind) {
    case RegimeKind::kSmallBm:
      require(hurst.is_brownian(), "additive Brownian regime requires H = 1/2");
      return u + regime.value;
    case RegimeKind::kSmallFbm:
      return u + regime_tau(regime, hurst, c) * std::pow(u, 2.0 * hurst.value() - 1.0);
    case RegimeKind::kLargeBm:
    case RegimeKind::kLargeFbm:
      return (1.0 + regime.value) * u;
  }
  throw std::logic_error("unreachable regime kind");
}

double marginal_sojourn_asymptotic(HurstParam hurst, double c, double u,
                                   const SojournWindows& windows,
                                   const ConstantEstimate& pickands,
                                   const ConstantEstimate& bar_x) {
  windows.validate();
  check_pickands(pickands, hurst, "marginal approximation");
  check_bar_single(bar_x, hurst, windows.script_t1, windows.x, "marginal approximation");
  return pickands.mc.value * bar_x.mc.value * sojourn_prefactor(hurst, c, u);
}

double joint_sojourn_asymptotic(HurstParam hurst, double c, double u,
                                const SojournWindows& windows, double lambda,
                                const ConstantEstimate& pickands,
                                const ConstantEstimate& bar_xy) {
  windows.validate();
  require(std::isfinite(lambda), "drift offset must be finite");
  check_pickands(pickands, hurst, "joint approximation");
  check_bar_joint(bar_xy, hurst, windows.script_t1, lambda, windows.script_t2,
                  windows.script_t3, windows.x, windows.y, "joint approximation");
  return pickands.mc.value * bar_xy.mc.value * sojourn_prefactor(hurst, c, u);
}

double thm1_limit(const ConstantEstimate& bar_xy, const ConstantEstimate& bar_x) {
  require(bar_xy.kind == ConstantKind::kBarJoint,
          "conditional limit: numerator must be a two-window constant");
  require(bar_x.kind == ConstantKind::kBarSingle,
          "conditional limit: denominator must be a one-window constant");
  require(detail::nearly_equal(bar_xy.hurst, bar_x.hurst),
          "conditional limit: Hurst parameter mismatch");
  require(detail::nearly_equal(bar_xy.t1, bar_x.t1),
          "conditional limit: first-window mismatch");
  require(detail::nearly_equal(bar_xy.x, bar_x.x),
          "conditional limit: first-threshold mismatch");
  if (!(bar_x.mc.value > 0.0)) {
    throw std::domain_error("conditional limit: one-window constant is not positive");
  }
  return bar_xy.mc.value / bar_x.mc.value;
}

Thm3Envelope thm3_envelope(HurstParam hurst, double c, double u, double a,
                           const SojournWindows& windows, const Thm3Estimates& estimates) {
  windows.validate();
  require(std::isfinite(a) && a > -1.0 && a != 0.0,
          "proportional shift requires a > -1 and a != 0");
  require(std::isfinite(u) && u > 0.0, "level must be positive");

  Thm3Envelope env;
  if (a < 0.0) {
    // Easier threshold: the conditional probability tends to 1 with no decay.
    return env;
  }

  const double h = hurst.value();
  const DerivedConstants k = derived_constants(hurst, c, u);
  const double rate = -0.5 * k.A * k.A * (std::pow(1.0 + a, 2.0 - 2.0 * h) - 1.0);
  env.log_rate = rate;
  env.decay = std::exp(rate * std::pow(u, 2.0 - 2.0 * h));

  const FluctuationRegime regime = FluctuationRegime::large_fbm(a);
  const double atilde = regime_a_tilde(regime, hurst);

  require(estimates.bar_x != nullptr && estimates.bar_ay_upper != nullptr &&
              estimates.bar_joint_lower != nullptr,
          "envelope for a > 0 requires all three constant estimates");
  check_bar_single(*estimates.bar_x, hurst, windows.script_t1, windows.x,
                   "envelope denominator");
  check_bar_single(*estimates.bar_ay_upper, hurst,
                   atilde * (windows.script_t3 - windows.script_t2), atilde * windows.y,
                   "envelope upper factor");
  check_bar_joint(*estimates.bar_joint_lower, hurst, atilde * windows.script_t1, 0.0,
                  atilde * windows.script_t2, atilde * windows.script_t3,
                  atilde * windows.x, atilde * windows.y, "envelope lower factor");
  if (!(estimates.bar_x->mc.value > 0.0)) {
    throw std::domain_error("envelope: one-window constant is not positive");
  }

  const double scale = std::pow(atilde, 1.0 - h) / estimates.bar_x->mc.value;
  env.lower = scale * estimates.bar_joint_lower->mc.value;
  env.upper = scale * estimates.bar_ay_upper->mc.value;
  return env;
}

}  // namespace fbmq
