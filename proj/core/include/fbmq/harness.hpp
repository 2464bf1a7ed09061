#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbmq/asymptotics.hpp"
#include "fbmq/brownian_exact.hpp"
#include "fbmq/mc_estimate.hpp"
#include "fbmq/workload.hpp"

namespace fbmq {

// Experiment driver layer: configuration, conditional-probability Monte Carlo,
// comparison against the asymptotic formulas, and CSV/JSON persistence.

// How the conditional probability is estimated:
//   kBrownianExact  H = 1/2 only. Exact conditional start u + Exp(2c), forward
//                   recursion on the absolute window [0, t2]; every replicate
//                   counts. Windows are absolute times (t1, t2, x); t3 = y = 0.
//   kFbmRejection   any H. Stationary-window rejection sampler with the scaled
//                   windows T_i(u) = script_ti * v(u) and thresholds x*v(u),
//                   y*v(u); replicates are accepted when the first-window
//                   sojourn above u exceeds x*v(u).
//   kSupRatio       ratio P(sup over [0, T(u)] of Q > u) / P(Q(0) > u) with
//                   T(u) = script_t1 * t_star * u^window_growth_exponent;
//                   requires H > 1/2 and exponent < (2H-1)/H.
enum class DriverKind { kBrownianExact, kFbmRejection, kSupRatio };

const char* driver_kind_name(DriverKind kind);

struct McConfig {
  std::int64_t reps = 10000;
  double step = 0.0078125;  // 2^-7
  double horizon = 0.0;     // 0 = automatic (scaled to the level under test)
  std::uint64_t seed = 1;
  int workers = 1;  // execution detail; never changes the results
};

struct OutputConfig {
  std::string csv_path;
  std::string json_path;
};

struct ExperimentConfig {
  DriverKind driver = DriverKind::kBrownianExact;
  QueueParams model{HurstParam(0.5), 1.0};
  FluctuationRegime regime = FluctuationRegime::small_bm(0.3);
  SojournWindows windows{};
  std::vector<double> u_list;
  McConfig mc{};
  OutputConfig outputs{};
  double window_growth_exponent = 0.0;  // kSupRatio only

  void validate() const;  // throws ConfigError
};

// Strict JSON parsing: missing keys, wrong types, and unknown keys at any
// nesting level are ConfigError with a path diagnostic.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

struct ResultRecord {
  double u = 0.0;
  double omega = 0.0;  // threshold level the target event uses
  MonteCarloEstimate mc;
  std::optional<double> closed_form;  // none of the conditional queries has one
  std::optional<double> asymptotic;
  std::optional<double> ratio_mc_over_asymptotic;
  std::int64_t effective_samples = 0;
};

// Per-config constants the asymptotic column needs, estimated once and shared
// across the u-loop (they do not depend on u for any supported regime).
struct AsymptoticContext {
  std::optional<CConstantEstimate> window_constant;  // Brownian driver
  double w_eff = 0.0;                                // additive shift fed to prop1
  std::optional<ConstantEstimate> bar_single;        // rejection driver, limit denominator
  std::optional<ConstantEstimate> bar_joint;         // rejection driver, limit numerator
};

AsymptoticContext prepare_asymptotics(const ExperimentConfig& config);

// One conditional-probability record at level u. The context overloads reuse
// precomputed constants; the two-argument forms prepare them internally.
ResultRecord estimate_conditional_bm(const ExperimentConfig& config, double u,
                                     const AsymptoticContext& context);
ResultRecord estimate_conditional_bm(const ExperimentConfig& config, double u);
ResultRecord estimate_conditional_fbm(const ExperimentConfig& config, double u,
                                      const AsymptoticContext& context);
ResultRecord estimate_conditional_fbm(const ExperimentConfig& config, double u);
ResultRecord estimate_sup_ratio(const ExperimentConfig& config, double u);

// Truncation horizon actually used at level u (0 for the Brownian driver,
// which needs none).
double resolved_horizon(const ExperimentConfig& config, double u);

struct ExperimentRun {
  ExperimentConfig config;
  std::vector<ResultRecord> records;  // one per u, in u_list order
  std::vector<double> horizons;       // resolved per u; empty for the Brownian driver
  AsymptoticContext context;          // constants behind the asymptotic column
};

ExperimentRun execute_experiment(const ExperimentConfig& config);

// CSV columns: u,omega,mc,se,eff_n,closed_form,asymptotic,ratio. Optional
// fields render as empty cells. Output is byte-identical for identical
// configs regardless of worker count.
std::string records_to_csv(const std::vector<ResultRecord>& records);
void write_csv(const std::string& path, const std::vector<ResultRecord>& records);

// JSON sidecar: config echo (without the worker count), per-record values, and
// provenance (seed, step, resolved horizons, auxiliary constants, build id).
std::string sidecar_to_json(const ExperimentRun& run);
void write_sidecar(const std::string& path, const ExperimentRun& run);

// Revision the library was built from (git describe at configure time).
std::string build_revision();

// Full pipeline for a config file: parse, validate, run, write both outputs.
// Returns a process exit code: 0 success, 2 bad config, 3 acceptance
// starvation, 4 resource cap, 1 anything else. Diagnostics go to stderr.
int run_experiment(const std::string& config_path);
int run_experiment(const ExperimentConfig& config);

// Built-in experiment presets.
std::vector<std::string> preset_names();
ExperimentConfig preset_config(const std::string& name);  // ConfigError if unknown

}  // namespace fbmq
