#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "fbmq/hurst.hpp"
#include "fbmq/mc_estimate.hpp"
#include "fbmq/time_grid.hpp"

namespace fbmq {

// Monte Carlo estimators for the extreme-value constants built from the
// drifted field W(t) = sqrt(2) B_H(t) - |t|^{2H}:
//
//  * the classical occupation constant  lim S^{-1} E[exp(sup_{[0,S]} W)],
//    estimated in ratio form (max over sum), whose replicates are uniformly
//    bounded — the plain mean of exp(sup) needs e^S samples to converge;
//  * the exponentially weighted sojourn constants over one window [0,t1)
//    and over two windows [0,t1) x [t2,t3) with a level shift lambda,
//    reduced exactly to means of exp(sojourn levels);
//  * the finite-horizon joint constant, an independent product of the
//    sup-exponential moment E[exp(sup_{[0,S]} W)] and the two-window constant.
//
// All estimators derive one substream per replicate from (seed, replicate),
// so results are bit-identical for any worker count.

// Two-window spec. Window 1 is [0, t1) with sojourn duration x; window 2 is
// [t2, t3) with duration y, level-shifted by lambda. t2 = 0 is allowed so the
// degenerate case (windows coincide) stays expressible.
struct BermanSpec {
  HurstParam hurst{0.5};
  double t1 = 1.0;
  double lambda = 0.0;
  double t2 = 0.0;
  double t3 = 1.0;
  double x = 0.0;
  double y = 0.0;

  void validate() const;
  bool zero_region() const noexcept;  // x >= t1 or y >= t3 - t2
};

enum class ConstantKind {
  kPickands,            // ratio-form occupation constant
  kPickandsAlphaTwo,    // degenerate-field validation path (variance |t|^2)
  kSupExp,              // E[exp(sup over [0,S) grid of W)], tilted estimator
  kBarSingle,           // one-window sojourn constant
  kBarJoint,            // two-window sojourn constant
  kFiniteHorizonJoint,  // sup-exp factor times the two-window constant
};

const char* constant_kind_name(ConstantKind kind);

// A Monte Carlo constant together with the parameters it was estimated for,
// so downstream formulas can refuse structurally mismatched inputs.
struct ConstantEstimate {
  ConstantKind kind = ConstantKind::kPickands;
  double hurst = 0.5;  // plain real: the alpha-two path records 1.0
  double span = 0.0;   // S for the sup-based kinds, 0 otherwise
  double t1 = 0.0, lambda = 0.0, t2 = 0.0, t3 = 0.0, x = 0.0, y = 0.0;
  MonteCarloEstimate mc;
};

std::string to_json_string(const ConstantEstimate& estimate);
ConstantEstimate constant_estimate_from_json(const std::string& json_text);

// Default grid step for the window constants: fine enough that the second
// window always holds at least 50 points.
double default_constant_step(double t2, double t3);

// Ratio-form estimator of the occupation constant on the symmetric window
// [-span/2, span/2]: replicate value max_j e^{W_j} / (step * sum_j e^{W_j}).
ConstantEstimate estimate_pickands(HurstParam hurst, double span, double step,
                                   std::int64_t reps, std::uint64_t seed, int workers = 1);

// Same ratio estimator for the degenerate field sqrt(2) t N - t^2 (N standard
// normal), the variance-|t|^2 validation path; exact value 1/sqrt(pi).
ConstantEstimate estimate_pickands_alpha_two(double span, double step, std::int64_t reps,
                                             std::uint64_t seed, int workers = 1);

// E[exp(max over the grid [0,span) of W)] via the exact tilt identity
//   E[e^{max F}] = sum_k E[ max_j e^{G(t_j - t_k)} / sum_j e^{G(t_j - t_k)} ],
// evaluated with sliding windows over one two-sided field per replicate.
// Replicates are bounded by the grid size, unlike the plain mean of e^{max}.
ConstantEstimate estimate_sup_exp(HurstParam hurst, double span, double step,
                                  std::int64_t reps, std::uint64_t seed, int workers = 1);

// Plain mean of exp(grid max) — the same grid functional as estimate_sup_exp,
// usable only for small spans (heavy-tailed replicates); kept as a cross-check.
ConstantEstimate estimate_sup_exp_naive(HurstParam hurst, double span, double step,
                                        std::int64_t reps, std::uint64_t seed,
                                        int workers = 1);

// One-window constant: mean of exp(sojourn level of W on [0,t1) at duration x).
ConstantEstimate estimate_bar_single(HurstParam hurst, double t1, double x, double step,
                                     std::int64_t reps, std::uint64_t seed, int workers = 1);

// Two-window constant: one W path per replicate, value
// exp(min(z1*, z2* - lambda)) with z1* = level on [0,t1) at x and z2* = level
// on [t2,t3) at y; negative-infinity levels contribute exactly 0.
ConstantEstimate estimate_bar_joint(const BermanSpec& spec, double step, std::int64_t reps,
                                    std::uint64_t seed, int workers = 1);

// Finite-horizon joint constant: product of an estimate_sup_exp run over
// [0,span) and an estimate_bar_joint run, on disjoint substreams, with a
// delta-method standard error. The two factors are independent by definition,
// so the product of means estimates the mean of the product.
ConstantEstimate estimate_finite_horizon_joint(const BermanSpec& spec, double span,
                                               double step, std::int64_t reps,
                                               std::uint64_t seed, int workers = 1);

// Literal paired form of the finite-horizon constant: per replicate two
// independent paths, value e^{grid max} * e^{min(z1*, z2*-lambda)}. Heavy
// tailed in span — meaningful for small spans only; kept as a cross-check.
ConstantEstimate estimate_finite_horizon_paired(const BermanSpec& spec, double span,
                                                double step, std::int64_t reps,
                                                std::uint64_t seed, int workers = 1);

// Replicate kernels on a given W path (grid must start at 0), exposed so
// pathwise properties (monotonicity in x, y, lambda; joint <= single) can be
// asserted replicate by replicate.
double bar_single_replicate(std::span<const double> w_values, const TimeGrid& grid,
                            double t1, double x);
double bar_joint_replicate(std::span<const double> w_values, const TimeGrid& grid,
                           const BermanSpec& spec);

// Ratio kernel max_j e^{F_j} / (step * sum_j e^{F_j}) for a sampled field.
double ratio_max_over_sum(std::span<const double> field_values, double step);

// Tilt-identity kernel: two-sided field on 2n+1 points with zero_index = n;
// returns the replicate value sum over the n+1 sliding windows.
double sup_exp_replicate(std::span<const double> two_sided_field, std::size_t zero_index);

}  // namespace fbmq
