#include "fbmq/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "fbmq/berman.hpp"
#include "fbmq/errors.hpp"
#include "fbmq/gaussian_paths.hpp"
#include "fbmq/parallel.hpp"
#include "internal_util.hpp"

namespace fbmq {

namespace {

using nlohmann::json;

constexpr std::int64_t kMinAccepted = 100;

// Seed tags for the auxiliary constant estimators, so they never share
// substreams with the main replicate loop.
constexpr std::uint64_t kTagWindowConstant = 101;
constexpr std::uint64_t kTagBarSingle = 102;
constexpr std::uint64_t kTagBarJoint = 103;

[[noreturn]] void config_fail(const std::string& path, const std::string& message) {
  throw ConfigError("config: " + path + ": " + message);
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) config_fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) config_fail(path, "unknown key \"" + it.key() + "\"");
  }
}

const json* find_key(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& require_key(const json& j, const std::string& path, const char* key) {
  const json* v = find_key(j, key);
  if (!v) config_fail(path, std::string("missing key \"") + key + "\"");
  return *v;
}

double get_number(const json& j, const std::string& path, const char* key) {
  const json& v = require_key(j, path, key);
  if (!v.is_number()) config_fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& j, const std::string& path, const char* key,
                     double fallback) {
  const json* v = find_key(j, key);
  if (!v) return fallback;
  if (!v->is_number()) config_fail(path + "." + key, "expected a number");
  return v->get<double>();
}

std::int64_t get_integer(const json& j, const std::string& path, const char* key) {
  const json& v = require_key(j, path, key);
  if (!v.is_number_integer()) config_fail(path + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_integer_or(const json& j, const std::string& path, const char* key,
                            std::int64_t fallback) {
  const json* v = find_key(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) config_fail(path + "." + key, "expected an integer");
  return v->get<std::int64_t>();
}

std::uint64_t get_seed(const json& j, const std::string& path, const char* key) {
  const json& v = require_key(j, path, key);
  if (!(v.is_number_integer() && v.get<std::int64_t>() >= 0) && !v.is_number_unsigned()) {
    config_fail(path + "." + key, "expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
  const json& v = require_key(j, path, key);
  if (!v.is_string()) config_fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

DriverKind driver_from_name(const std::string& name, const std::string& path) {
  if (name == "bm") return DriverKind::kBrownianExact;
  if (name == "fbm") return DriverKind::kFbmRejection;
  if (name == "sup-ratio") return DriverKind::kSupRatio;
  config_fail(path, "unknown driver \"" + name + "\" (expected bm, fbm, or sup-ratio)");
}

RegimeKind regime_from_name(const std::string& name, const std::string& path) {
  if (name == "small-bm") return RegimeKind::kSmallBm;
  if (name == "large-bm") return RegimeKind::kLargeBm;
  if (name == "small-fbm") return RegimeKind::kSmallFbm;
  if (name == "large-fbm") return RegimeKind::kLargeFbm;
  config_fail(path, "unknown regime kind \"" + name +
                        "\" (expected small-bm, large-bm, small-fbm, or large-fbm)");
}

// Attaches the asymptotic column (and the MC/asymptotic ratio) to a record.
void attach_asymptotic(ResultRecord& rec, const ExperimentConfig& cfg,
                       const AsymptoticContext& ctx) {
  const double c = cfg.model.drain;
  std::optional<double> asym;
  if (cfg.driver == DriverKind::kBrownianExact) {
    switch (cfg.regime.kind) {
      case RegimeKind::kSmallBm:
      case RegimeKind::kSmallFbm:
        if (ctx.window_constant) {
          asym = prop1_approx(c, ctx.w_eff, *ctx.window_constant);
        }
        break;
      case RegimeKind::kLargeBm:
      case RegimeKind::kLargeFbm:
        asym = prop2_approx(c, cfg.regime.value, rec.u, rec.omega,
                            ctx.window_constant ? &*ctx.window_constant : nullptr);
        break;
    }
  } else if (cfg.driver == DriverKind::kFbmRejection) {
    if (cfg.regime.kind == RegimeKind::kSmallFbm && ctx.bar_joint && ctx.bar_single) {
      asym = thm1_limit(*ctx.bar_joint, *ctx.bar_single);
    } else if (cfg.regime.is_large() && cfg.regime.value < 0.0) {
      asym = 1.0;  // easier proportional threshold: conditional probability -> 1
    }
  } else {
    asym = 1.0;  // sup-ratio: the ratio itself tends to 1
  }
  rec.asymptotic = asym;
  if (asym && *asym != 0.0) {
    rec.ratio_mc_over_asymptotic = rec.mc.value / *asym;
  }
}

void check_driver(const ExperimentConfig& cfg, DriverKind expected, const char* fn) {
  if (cfg.driver != expected) {
    throw ConfigError(std::string("config: ") + fn + " requires the " +
                      driver_kind_name(expected) + " driver, config selects " +
                      driver_kind_name(cfg.driver));
  }
}

void check_level(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) {
    throw std::invalid_argument("level u must be positive and finite");
  }
}

std::string starvation_message(const char* what, double u, std::int64_t got,
                               std::int64_t reps) {
  std::ostringstream os;
  os << what << " at u=" << u << ": " << got << " of " << reps
     << " replicates qualified (floor " << kMinAccepted
     << "); lower u, increase reps, or widen the conditioning window";
  return os.str();
}

json constant_to_json(const ConstantEstimate& est) {
  return json::parse(to_json_string(est));
}

json window_constant_to_json(const CConstantEstimate& est) {
  json j;
  j["kind"] = "window-constant";
  j["t1"] = est.spec.t1;
  j["t2"] = est.spec.t2;
  j["x"] = est.spec.x;
  if (est.spec.w_is_infinite()) {
    j["w"] = "infinity";
  } else {
    j["w"] = est.spec.w;
  }
  j["c"] = est.spec.c;
  j["value"] = est.mc.value;
  j["std_error"] = est.mc.std_error;
  j["reps"] = est.mc.reps;
  j["step"] = est.mc.step;
  j["seed"] = est.mc.seed;
  j["notes"] = est.mc.notes;
  return j;
}

}  // namespace

const char* driver_kind_name(DriverKind kind) {
  switch (kind) {
    case DriverKind::kBrownianExact: return "bm";
    case DriverKind::kFbmRejection: return "fbm";
    case DriverKind::kSupRatio: return "sup-ratio";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  auto wrap = [](const char* where, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + where + ": " + e.what());
    }
  };
  wrap("model", [&] { model.validate(); });
  wrap("regime", [&] { regime.validate(); });

  if (u_list.empty()) throw ConfigError("config: u_list: must be nonempty");
  for (double u : u_list) {
    if (!(u > 0.0) || !std::isfinite(u)) {
      throw ConfigError("config: u_list: levels must be positive and finite");
    }
  }
  for (std::size_t i = 1; i < u_list.size(); ++i) {
    if (!(u_list[i] > u_list[i - 1])) {
      throw ConfigError("config: u_list: levels must be strictly ascending");
    }
  }

  if (mc.reps < 1) throw ConfigError("config: mc.reps: must be >= 1");
  if (!(mc.step > 0.0) || !std::isfinite(mc.step)) {
    throw ConfigError("config: mc.step: must be positive and finite");
  }
  if (!(mc.horizon >= 0.0) || !std::isfinite(mc.horizon)) {
    throw ConfigError("config: mc.horizon: must be nonnegative and finite");
  }
  if (mc.workers < 0) throw ConfigError("config: mc.workers: must be >= 0");

  if (window_growth_exponent != 0.0 && driver != DriverKind::kSupRatio) {
    throw ConfigError("config: window_growth_exponent: only the sup-ratio driver uses it");
  }

  switch (driver) {
    case DriverKind::kBrownianExact: {
      if (!model.hurst.is_brownian()) {
        throw ConfigError("config: driver bm requires hurst = 0.5");
      }
      if (!(windows.script_t1 >= 0.0) || !(windows.script_t2 > windows.script_t1) ||
          !std::isfinite(windows.script_t2)) {
        throw ConfigError(
            "config: windows: driver bm needs absolute times 0 <= t1 < t2");
      }
      if (!(windows.x >= 0.0) || !std::isfinite(windows.x)) {
        throw ConfigError("config: windows.x: must be nonnegative and finite");
      }
      if (windows.script_t3 != 0.0 || windows.y != 0.0) {
        throw ConfigError(
            "config: windows: driver bm uses (t1, t2, x) only; set t3 = y = 0");
      }
      break;
    }
    case DriverKind::kFbmRejection: {
      wrap("windows", [&] { windows.validate(); });
      if (regime.kind == RegimeKind::kSmallBm && !model.hurst.is_brownian()) {
        throw ConfigError("config: regime small-bm requires hurst = 0.5");
      }
      break;
    }
    case DriverKind::kSupRatio: {
      if (!(model.hurst.value() > 0.5)) {
        throw ConfigError("config: sup-ratio driver requires hurst > 0.5");
      }
      if (regime.kind != RegimeKind::kSmallFbm || regime.value != 0.0) {
        throw ConfigError(
            "config: sup-ratio driver requires regime {kind: small-fbm, value: 0}");
      }
      const double qmax = (2.0 * model.hurst.value() - 1.0) / model.hurst.value();
      if (!(window_growth_exponent >= 0.0) || !(window_growth_exponent < qmax)) {
        throw ConfigError(
            "config: window_growth_exponent: must lie in [0, (2H-1)/H) = [0, " +
            detail::format_double(qmax) + ")");
      }
      if (!(windows.script_t1 > 0.0) || !std::isfinite(windows.script_t1)) {
        throw ConfigError("config: windows.t1: must be positive and finite");
      }
      if (windows.script_t2 != 0.0 || windows.script_t3 != 0.0 || windows.x != 0.0 ||
          windows.y != 0.0) {
        throw ConfigError(
            "config: windows: sup-ratio driver uses t1 only; set t2 = t3 = x = y = 0");
      }
      break;
    }
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  expect_object(j, "$");
  check_keys(j, "$",
             {"driver", "model", "regime", "windows", "u_list", "mc", "outputs",
              "window_growth_exponent"});

  ExperimentConfig cfg;

  const json& model = require_key(j, "$", "model");
  expect_object(model, "$.model");
  check_keys(model, "$.model", {"hurst", "drain"});
  const double h = get_number(model, "$.model", "hurst");
  try {
    cfg.model.hurst = HurstParam(h);
  } catch (const std::exception& e) {
    config_fail("$.model.hurst", e.what());
  }
  cfg.model.drain = get_number(model, "$.model", "drain");

  const json& regime = require_key(j, "$", "regime");
  expect_object(regime, "$.regime");
  check_keys(regime, "$.regime", {"kind", "value"});
  cfg.regime.kind = regime_from_name(get_string(regime, "$.regime", "kind"), "$.regime.kind");
  cfg.regime.value = get_number(regime, "$.regime", "value");

  const json& windows = require_key(j, "$", "windows");
  expect_object(windows, "$.windows");
  check_keys(windows, "$.windows", {"t1", "t2", "t3", "x", "y"});
  cfg.windows.script_t1 = get_number(windows, "$.windows", "t1");
  cfg.windows.script_t2 = get_number(windows, "$.windows", "t2");
  cfg.windows.script_t3 = get_number(windows, "$.windows", "t3");
  cfg.windows.x = get_number(windows, "$.windows", "x");
  cfg.windows.y = get_number(windows, "$.windows", "y");

  const json& u_list = require_key(j, "$", "u_list");
  if (!u_list.is_array()) config_fail("$.u_list", "expected an array of numbers");
  for (std::size_t i = 0; i < u_list.size(); ++i) {
    if (!u_list[i].is_number()) {
      config_fail("$.u_list[" + std::to_string(i) + "]", "expected a number");
    }
    cfg.u_list.push_back(u_list[i].get<double>());
  }

  const json& mc = require_key(j, "$", "mc");
  expect_object(mc, "$.mc");
  check_keys(mc, "$.mc", {"reps", "step", "horizon", "seed", "workers"});
  cfg.mc.reps = get_integer(mc, "$.mc", "reps");
  cfg.mc.step = get_number(mc, "$.mc", "step");
  cfg.mc.horizon = get_number_or(mc, "$.mc", "horizon", 0.0);
  cfg.mc.seed = get_seed(mc, "$.mc", "seed");
  const std::int64_t workers = get_integer_or(mc, "$.mc", "workers", 1);
  if (workers < 0 || workers > 4096) config_fail("$.mc.workers", "expected 0..4096");
  cfg.mc.workers = static_cast<int>(workers);

  const json& outputs = require_key(j, "$", "outputs");
  expect_object(outputs, "$.outputs");
  check_keys(outputs, "$.outputs", {"csv_path", "json_path"});
  cfg.outputs.csv_path = get_string(outputs, "$.outputs", "csv_path");
  cfg.outputs.json_path = get_string(outputs, "$.outputs", "json_path");

  if (const json* driver = find_key(j, "driver")) {
    if (!driver->is_string()) config_fail("$.driver", "expected a string");
    cfg.driver = driver_from_name(driver->get<std::string>(), "$.driver");
  } else {
    cfg.driver = (cfg.regime.kind == RegimeKind::kSmallBm ||
                  cfg.regime.kind == RegimeKind::kLargeBm)
                     ? DriverKind::kBrownianExact
                     : DriverKind::kFbmRejection;
  }

  cfg.window_growth_exponent = get_number_or(j, "$", "window_growth_exponent", 0.0);

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  json j;
  j["driver"] = driver_kind_name(config.driver);
  j["model"] = {{"hurst", config.model.hurst.value()}, {"drain", config.model.drain}};
  j["regime"] = {{"kind", regime_kind_name(config.regime.kind)},
                 {"value", config.regime.value}};
  j["windows"] = {{"t1", config.windows.script_t1},
                  {"t2", config.windows.script_t2},
                  {"t3", config.windows.script_t3},
                  {"x", config.windows.x},
                  {"y", config.windows.y}};
  j["u_list"] = config.u_list;
  j["mc"] = {{"reps", config.mc.reps},
             {"step", config.mc.step},
             {"horizon", config.mc.horizon},
             {"seed", config.mc.seed}};
  j["outputs"] = {{"csv_path", config.outputs.csv_path},
                  {"json_path", config.outputs.json_path}};
  j["window_growth_exponent"] = config.window_growth_exponent;
  return j.dump(2);
}

AsymptoticContext prepare_asymptotics(const ExperimentConfig& config) {
  config.validate();
  AsymptoticContext ctx;
  const double c = config.model.drain;
  if (config.driver == DriverKind::kBrownianExact) {
    switch (config.regime.kind) {
      case RegimeKind::kSmallBm:
      case RegimeKind::kSmallFbm: {
        // At H = 1/2 the additive shift is level-free, so one window constant
        // serves the whole u-loop.
        ctx.w_eff = regime_tau(config.regime, config.model.hurst, c);
        const CConstantSpec spec{config.windows.script_t1, config.windows.script_t2,
                                 config.windows.x, ctx.w_eff, c};
        ctx.window_constant =
            estimate_C(spec, config.mc.step, config.mc.reps,
                       derive_seed(config.mc.seed, kTagWindowConstant), config.mc.workers);
        break;
      }
      case RegimeKind::kLargeBm:
      case RegimeKind::kLargeFbm: {
        if (config.regime.value > 0.0) {
          const CConstantSpec spec{config.windows.script_t1, config.windows.script_t2,
                                   config.windows.x, CConstantSpec::infinite_w(), c};
          ctx.window_constant =
              estimate_C(spec, config.mc.step, config.mc.reps,
                         derive_seed(config.mc.seed, kTagWindowConstant),
                         config.mc.workers);
        }
        break;
      }
    }
  } else if (config.driver == DriverKind::kFbmRejection &&
             config.regime.kind == RegimeKind::kSmallFbm) {
    const double cstep =
        default_constant_step(config.windows.script_t2, config.windows.script_t3);
    ctx.bar_single = estimate_bar_single(
        config.model.hurst, config.windows.script_t1, config.windows.x, cstep,
        config.mc.reps, derive_seed(config.mc.seed, kTagBarSingle), config.mc.workers);
    const BermanSpec spec{config.model.hurst,      config.windows.script_t1,
                          config.regime.value,     config.windows.script_t2,
                          config.windows.script_t3, config.windows.x,
                          config.windows.y};
    ctx.bar_joint =
        estimate_bar_joint(spec, cstep, config.mc.reps,
                           derive_seed(config.mc.seed, kTagBarJoint), config.mc.workers);
  }
  return ctx;
}

double resolved_horizon(const ExperimentConfig& config, double u) {
  check_level(u);
  if (config.driver == DriverKind::kBrownianExact) return 0.0;
  if (config.mc.horizon > 0.0) return config.mc.horizon;
  const double omega =
      threshold_level(config.regime, config.model.hurst, config.model.drain, u);
  return default_horizon(config.model, std::max(u, omega));
}

ResultRecord estimate_conditional_bm(const ExperimentConfig& config, double u,
                                     const AsymptoticContext& context) {
  config.validate();
  check_driver(config, DriverKind::kBrownianExact, "estimate_conditional_bm");
  check_level(u);

  const double c = config.model.drain;
  const double omega = threshold_level(config.regime, config.model.hurst, c, u);
  const double t1 = config.windows.script_t1;
  const double t2 = config.windows.script_t2;
  const double x = config.windows.x;
  const double step = config.mc.step;
  const std::size_t count =
      static_cast<std::size_t>(detail::checked_steps(t2, step, "window end")) + 1;

  const std::int64_t reps = config.mc.reps;
  std::vector<double> values(static_cast<std::size_t>(reps));

  struct Worker {
    FbmSampler sampler;
    GaussianPath driver;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(config.mc.workers),
      [&](unsigned) {
        Worker w{FbmSampler(0, count - 1, step, config.model.hurst), GaussianPath{}};
        w.driver.grid = TimeGrid{0.0, step, count};
        w.driver.kind = PathKind::Fbm;
        w.driver.values.resize(count);
        return w;
      },
      [&](std::uint64_t r, Worker& w) {
        Rng rng = substream(config.mc.seed, r);
        // The overshoot is drawn before the path so the path draws are
        // identical across configs that differ only in u or in the regime.
        const double q0 = sample_conditional_initial(c, u, rng);
        w.sampler.sample(rng, w.driver.values);
        const WorkloadPath wp = simulate_forward(config.model, q0, w.driver);
        values[r] = sojourn_time(wp, omega, t1, t2) > x ? 1.0 : 0.0;
      });

  const detail::MeanSe red = detail::reduce_mean_se(values);
  ResultRecord rec;
  rec.u = u;
  rec.omega = omega;
  rec.mc.value = red.mean;
  rec.mc.std_error = red.se;
  rec.mc.reps = red.n;
  rec.mc.seed = config.mc.seed;
  rec.mc.step = step;
  rec.effective_samples = red.n;
  attach_asymptotic(rec, config, context);
  return rec;
}

ResultRecord estimate_conditional_bm(const ExperimentConfig& config, double u) {
  return estimate_conditional_bm(config, u, prepare_asymptotics(config));
}

ResultRecord estimate_conditional_fbm(const ExperimentConfig& config, double u,
                                      const AsymptoticContext& context) {
  config.validate();
  check_driver(config, DriverKind::kFbmRejection, "estimate_conditional_fbm");
  check_level(u);

  const double c = config.model.drain;
  const HurstParam hurst = config.model.hurst;
  const DerivedConstants k = derived_constants(hurst, c, u);
  const double v = k.v_u;
  const double omega = threshold_level(config.regime, hurst, c, u);
  const double t1_u = config.windows.script_t1 * v;
  const double t2_u = config.windows.script_t2 * v;
  const double t3_u = config.windows.script_t3 * v;
  const double x_abs = config.windows.x * v;
  const double y_abs = config.windows.y * v;
  const double window_end = std::max(t1_u, t3_u);
  const double horizon = resolved_horizon(config, u);
  const double step = config.mc.step;

  const std::size_t window_count =
      static_cast<std::size_t>(detail::checked_steps(window_end, step, "window end")) + 1;
  const std::size_t lookahead = static_cast<std::size_t>(
      std::max<std::int64_t>(1, detail::checked_steps(horizon, step, "horizon")));
  const std::size_t total = window_count + lookahead;

  const std::int64_t reps = config.mc.reps;
  std::vector<double> values(static_cast<std::size_t>(reps));
  const double nan = std::numeric_limits<double>::quiet_NaN();

  struct Worker {
    FbmSampler sampler;
    GaussianPath driver;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(config.mc.workers),
      [&](unsigned) {
        Worker w{FbmSampler(0, total - 1, step, hurst), GaussianPath{}};
        w.driver.grid = TimeGrid{0.0, step, total};
        w.driver.kind = PathKind::Fbm;
        w.driver.values.resize(total);
        return w;
      },
      [&](std::uint64_t r, Worker& w) {
        Rng rng = substream(config.mc.seed, r);
        w.sampler.sample(rng, w.driver.values);
        const WorkloadPath wp =
            stationary_window_from_driver(config.model, w.driver, window_end, horizon);
        if (!(sojourn_time(wp, u, 0.0, t1_u) > x_abs)) {
          values[r] = nan;  // rejected: conditioning event missed
          return;
        }
        values[r] = sojourn_time(wp, omega, t2_u, t3_u) > y_abs ? 1.0 : 0.0;
      });

  const detail::MeanSe red = detail::reduce_mean_se(values);
  if (red.n < kMinAccepted) {
    throw AcceptanceStarvation(
        starvation_message("acceptance starvation", u, red.n, reps),
        static_cast<std::uint64_t>(red.n));
  }

  ResultRecord rec;
  rec.u = u;
  rec.omega = omega;
  rec.mc.value = red.mean;
  rec.mc.std_error = red.se;
  rec.mc.reps = red.n;
  rec.mc.seed = config.mc.seed;
  rec.mc.step = step;
  rec.mc.notes.push_back("accepted " + std::to_string(red.n) + " of " +
                         std::to_string(reps) + " replicates");
  rec.effective_samples = red.n;
  attach_asymptotic(rec, config, context);
  return rec;
}

ResultRecord estimate_conditional_fbm(const ExperimentConfig& config, double u) {
  return estimate_conditional_fbm(config, u, prepare_asymptotics(config));
}

ResultRecord estimate_sup_ratio(const ExperimentConfig& config, double u) {
  config.validate();
  check_driver(config, DriverKind::kSupRatio, "estimate_sup_ratio");
  check_level(u);

  const HurstParam hurst = config.model.hurst;
  const double c = config.model.drain;
  const DerivedConstants k = derived_constants(hurst, c, u);
  const double window_end =
      config.windows.script_t1 * k.t_star * std::pow(u, config.window_growth_exponent);
  const double horizon = resolved_horizon(config, u);
  const double step = config.mc.step;

  const std::size_t window_count =
      static_cast<std::size_t>(detail::checked_steps(window_end, step, "window end")) + 1;
  const std::size_t lookahead = static_cast<std::size_t>(
      std::max<std::int64_t>(1, detail::checked_steps(horizon, step, "horizon")));
  const std::size_t total = window_count + lookahead;

  const std::int64_t reps = config.mc.reps;
  std::vector<unsigned char> sup_hits(static_cast<std::size_t>(reps), 0);
  std::vector<unsigned char> point_hits(static_cast<std::size_t>(reps), 0);

  struct Worker {
    FbmSampler sampler;
    GaussianPath driver;
  };
  parallel_replicates(
      static_cast<std::uint64_t>(reps), static_cast<unsigned>(config.mc.workers),
      [&](unsigned) {
        Worker w{FbmSampler(0, total - 1, step, hurst), GaussianPath{}};
        w.driver.grid = TimeGrid{0.0, step, total};
        w.driver.kind = PathKind::Fbm;
        w.driver.values.resize(total);
        return w;
      },
      [&](std::uint64_t r, Worker& w) {
        Rng rng = substream(config.mc.seed, r);
        w.sampler.sample(rng, w.driver.values);
        const WorkloadPath wp =
            stationary_window_from_driver(config.model, w.driver, window_end, horizon);
        bool sup_hit = false;
        for (double q : wp.values) {
          if (q > u) {
            sup_hit = true;
            break;
          }
        }
        sup_hits[r] = sup_hit ? 1 : 0;
        point_hits[r] = wp.values.front() > u ? 1 : 0;
      });

  std::int64_t n_sup = 0;
  std::int64_t n_point = 0;
  for (std::int64_t r = 0; r < reps; ++r) {
    n_sup += sup_hits[static_cast<std::size_t>(r)];
    n_point += point_hits[static_cast<std::size_t>(r)];
  }
  if (n_point < kMinAccepted) {
    throw AcceptanceStarvation(
        starvation_message("stationary-tail starvation", u, n_point, reps),
        static_cast<std::uint64_t>(n_point));
  }

  const double n = static_cast<double>(reps);
  const double p_sup = static_cast<double>(n_sup) / n;
  const double p_point = static_cast<double>(n_point) / n;
  const double ratio = static_cast<double>(n_sup) / static_cast<double>(n_point);
  // Delta method for the ratio of the two indicator means; the point event
  // implies the sup event, which fixes their covariance at p_point*(1-p_sup).
  const double var_n = p_sup * p_sup * (1.0 - p_point) / (p_point * p_point * p_point) -
                       p_sup * (1.0 - p_sup) / (p_point * p_point);
  const double se = std::sqrt(std::max(0.0, var_n) / n);

  ResultRecord rec;
  rec.u = u;
  rec.omega = u;
  rec.mc.value = ratio;
  rec.mc.std_error = se;
  rec.mc.reps = reps;
  rec.mc.seed = config.mc.seed;
  rec.mc.step = step;
  rec.mc.notes.push_back("window exceedances " + std::to_string(n_sup) +
                         ", stationary exceedances " + std::to_string(n_point));
  rec.effective_samples = n_point;
  attach_asymptotic(rec, config, AsymptoticContext{});
  return rec;
}

ExperimentRun execute_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentRun run;
  run.config = config;
  run.context = prepare_asymptotics(config);
  run.records.reserve(config.u_list.size());
  for (double u : config.u_list) {
    switch (config.driver) {
      case DriverKind::kBrownianExact:
        run.records.push_back(estimate_conditional_bm(config, u, run.context));
        break;
      case DriverKind::kFbmRejection:
        run.records.push_back(estimate_conditional_fbm(config, u, run.context));
        break;
      case DriverKind::kSupRatio:
        run.records.push_back(estimate_sup_ratio(config, u));
        break;
    }
    if (config.driver != DriverKind::kBrownianExact) {
      run.horizons.push_back(resolved_horizon(config, u));
    }
  }
  return run;
}

std::string records_to_csv(const std::vector<ResultRecord>& records) {
  std::string out = "u,omega,mc,se,eff_n,closed_form,asymptotic,ratio\n";
  for (const ResultRecord& r : records) {
    out += detail::format_double(r.u);
    out += ',';
    out += detail::format_double(r.omega);
    out += ',';
    out += detail::format_double(r.mc.value);
    out += ',';
    out += detail::format_double(r.mc.std_error);
    out += ',';
    out += std::to_string(r.effective_samples);
    out += ',';
    if (r.closed_form) out += detail::format_double(*r.closed_form);
    out += ',';
    if (r.asymptotic) out += detail::format_double(*r.asymptotic);
    out += ',';
    if (r.ratio_mc_over_asymptotic) {
      out += detail::format_double(*r.ratio_mc_over_asymptotic);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<ResultRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file \"" + path + "\"");
  out << records_to_csv(records);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file \"" + path + "\"");
}

std::string sidecar_to_json(const ExperimentRun& run) {
  json j;
  j["config"] = json::parse(config_to_json(run.config));

  json prov;
  prov["build"] = build_revision();
  prov["seed"] = run.config.mc.seed;
  prov["step"] = run.config.mc.step;
  prov["horizons"] = run.horizons;
  json constants = json::array();
  if (run.context.window_constant) {
    constants.push_back(window_constant_to_json(*run.context.window_constant));
  }
  if (run.context.bar_single) {
    constants.push_back(constant_to_json(*run.context.bar_single));
  }
  if (run.context.bar_joint) {
    constants.push_back(constant_to_json(*run.context.bar_joint));
  }
  prov["constants"] = constants;
  j["provenance"] = prov;

  json records = json::array();
  for (const ResultRecord& r : run.records) {
    json rec;
    rec["u"] = r.u;
    rec["omega"] = r.omega;
    rec["mc"] = r.mc.value;
    rec["se"] = r.mc.std_error;
    rec["eff_n"] = r.effective_samples;
    rec["closed_form"] = r.closed_form ? json(*r.closed_form) : json(nullptr);
    rec["asymptotic"] = r.asymptotic ? json(*r.asymptotic) : json(nullptr);
    rec["ratio"] =
        r.ratio_mc_over_asymptotic ? json(*r.ratio_mc_over_asymptotic) : json(nullptr);
    rec["notes"] = r.mc.notes;
    records.push_back(rec);
  }
  j["records"] = records;
  return j.dump(2) + "\n";
}

void write_sidecar(const std::string& path, const ExperimentRun& run) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file \"" + path + "\"");
  out << sidecar_to_json(run);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file \"" + path + "\"");
}

std::string build_revision() {
#ifdef FBMQ_BUILD_REVISION
  return FBMQ_BUILD_REVISION;
#else
  return "unknown";
#endif
}

int run_experiment(const ExperimentConfig& config) {
  try {
    const ExperimentRun run = execute_experiment(config);
    if (!config.outputs.csv_path.empty()) write_csv(config.outputs.csv_path, run.records);
    if (!config.outputs.json_path.empty()) write_sidecar(config.outputs.json_path, run);
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const AcceptanceStarvation& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int run_experiment(const std::string& config_path) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return run_experiment(config);
}

std::vector<std::string> preset_names() {
  return {"prop1-bm", "prop2-sub", "prop2-super", "thm1-bm", "piterbarg-check"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  cfg.model = QueueParams{HurstParam(0.5), 1.0};
  cfg.mc.seed = 20260819;
  cfg.mc.workers = 1;
  if (name == "prop1-bm") {
    cfg.driver = DriverKind::kBrownianExact;
    cfg.regime = FluctuationRegime::small_bm(0.3);
    cfg.windows = SojournWindows{0.0, 1.0, 0.0, 0.2, 0.0};
    cfg.u_list = {2.0, 3.0, 4.0};
    cfg.mc.reps = 100000;
    cfg.mc.step = 0.00390625;  // 2^-8
  } else if (name == "prop2-sub") {
    cfg.driver = DriverKind::kBrownianExact;
    cfg.regime = FluctuationRegime::large_bm(-0.5);
    cfg.windows = SojournWindows{0.0, 1.0, 0.0, 0.2, 0.0};
    cfg.u_list = {2.0, 3.0, 4.0};
    cfg.mc.reps = 50000;
    cfg.mc.step = 0.00390625;
  } else if (name == "prop2-super") {
    cfg.driver = DriverKind::kBrownianExact;
    cfg.regime = FluctuationRegime::large_bm(1.0);
    cfg.windows = SojournWindows{0.0, 1.0, 0.0, 0.2, 0.0};
    cfg.u_list = {1.5, 2.0, 3.0};
    cfg.mc.reps = 200000;
    cfg.mc.step = 0.00390625;
  } else if (name == "thm1-bm") {
    cfg.driver = DriverKind::kFbmRejection;
    cfg.regime = FluctuationRegime::small_fbm(1.0);
    cfg.windows = SojournWindows{1.0, 0.5, 1.5, 0.2, 0.3};
    cfg.u_list = {2.0, 2.5, 3.0};
    cfg.mc.reps = 200000;
    cfg.mc.step = 0.0078125;  // 2^-7
    cfg.mc.horizon = 12.0;
  } else if (name == "piterbarg-check") {
    cfg.driver = DriverKind::kSupRatio;
    cfg.model = QueueParams{HurstParam(0.7), 1.0};
    cfg.regime = FluctuationRegime::small_fbm(0.0);
    cfg.windows = SojournWindows{1.0, 0.0, 0.0, 0.0, 0.0};
    cfg.u_list = {2.0, 3.0, 5.0};
    cfg.window_growth_exponent = 0.3;
    cfg.mc.reps = 20000;
    cfg.mc.step = 0.03125;  // 2^-5
  } else {
    std::string names;
    for (const std::string& n : preset_names()) {
      if (!names.empty()) names += ", ";
      names += n;
    }
    throw ConfigError("unknown preset \"" + name + "\" (available: " + names + ")");
  }
  cfg.outputs = OutputConfig{name + ".csv", name + ".json"};
  cfg.validate();
  return cfg;
}

}  // namespace fbmq
