// Command line front end for the fluid-queue Monte Carlo toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <fbmq/asymptotics.hpp>
#include <fbmq/berman.hpp>
#include <fbmq/brownian_exact.hpp>
#include <fbmq/errors.hpp>
#include <fbmq/gaussian_paths.hpp>
#include <fbmq/harness.hpp>
#include <fbmq/rng.hpp>
#include <fbmq/workload.hpp>

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Writes text to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file \"" + out_path + "\"");
  out << text;
  if (!out) throw std::runtime_error("failed writing \"" + out_path + "\"");
}

json mc_to_json(const fbmq::MonteCarloEstimate& mc) {
  json j;
  j["value"] = mc.value;
  j["std_error"] = mc.std_error;
  j["reps"] = mc.reps;
  j["seed"] = mc.seed;
  j["step"] = mc.step;
  j["notes"] = mc.notes;
  return j;
}

json window_constant_json(const fbmq::CConstantEstimate& est) {
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
  j["estimate"] = mc_to_json(est.mc);
  return j;
}

double parse_w(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "+inf") {
    return fbmq::CConstantSpec::infinite_w();
  }
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw fbmq::ConfigError("cannot parse w value \"" + text + "\"");
  return v;
}

// Paths-as-columns CSV shared by fbm-gen and queue-sim.
std::string paths_csv(const fbmq::TimeGrid& grid, const std::vector<std::vector<double>>& paths) {
  std::string out = "t";
  for (std::size_t p = 0; p < paths.size(); ++p) out += ",path_" + std::to_string(p);
  out += '\n';
  for (std::size_t i = 0; i < grid.count; ++i) {
    out += fmt(grid.point(i));
    for (const auto& path : paths) {
      out += ',';
      out += fmt(path[i]);
    }
    out += '\n';
  }
  return out;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const fbmq::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const fbmq::AcceptanceStarvation& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const fbmq::ResourceError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and asymptotics for the fractional Brownian fluid queue"};
  app.require_subcommand(1);

  // ---------------------------------------------------------------- fbm-gen
  struct {
    double hurst = 0.5;
    double length = 1.0;
    double step = 0.0078125;
    std::int64_t paths = 1;
    std::uint64_t seed = 1;
    std::string out;
  } gen;
  CLI::App* fbm_gen = app.add_subcommand("fbm-gen", "sample fractional Brownian paths");
  fbm_gen->add_option("--hurst", gen.hurst, "Hurst parameter in (0,1)")->capture_default_str();
  fbm_gen->add_option("--length", gen.length, "time horizon")->capture_default_str();
  fbm_gen->add_option("--step", gen.step, "grid step")->capture_default_str();
  fbm_gen->add_option("--paths", gen.paths, "number of paths")->capture_default_str();
  fbm_gen->add_option("--seed", gen.seed, "master seed")->capture_default_str();
  fbm_gen->add_option("--out", gen.out, "output CSV path (default stdout)");

  // --------------------------------------------------------------- queue-sim
  struct {
    double hurst = 0.5;
    double drain = 1.0;
    double window_end = 1.0;
    double horizon = 10.0;
    double q0 = -1.0;  // negative = stationary start
    double step = 0.0078125;
    std::int64_t paths = 1;
    std::uint64_t seed = 1;
    std::string out;
  } qs;
  CLI::App* queue_sim = app.add_subcommand("queue-sim", "simulate the workload process");
  queue_sim->add_option("--hurst", qs.hurst, "Hurst parameter")->capture_default_str();
  queue_sim->add_option("--drain", qs.drain, "drain rate c > 0")->capture_default_str();
  queue_sim->add_option("--window-end", qs.window_end, "simulate Q on [0, window_end]")
      ->capture_default_str();
  queue_sim->add_option("--horizon", qs.horizon,
                        "stationary-supremum truncation horizon")
      ->capture_default_str();
  queue_sim->add_option("--q0", qs.q0,
                        "start from this level instead of the stationary law");
  queue_sim->add_option("--step", qs.step, "grid step")->capture_default_str();
  queue_sim->add_option("--paths", qs.paths, "number of paths")->capture_default_str();
  queue_sim->add_option("--seed", qs.seed, "master seed")->capture_default_str();
  queue_sim->add_option("--out", qs.out, "output CSV path (default stdout)");

  // --------------------------------------------------------------- constants
  struct {
    double hurst = 0.5;
    double span = 128.0;
    double step = 0.00390625;
    double t1 = 1.0, lambda = 0.0, t2 = 0.0, t3 = 1.0, x = 0.0, y = 0.0;
    std::int64_t reps = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    bool alpha2 = false;
    bool paired = false;
    std::string out;
  } ct;
  CLI::App* constants = app.add_subcommand("constants", "Monte Carlo occupation constants");
  constants->require_subcommand(1);
  CLI::App* ct_pickands =
      constants->add_subcommand("pickands", "occupation constant, ratio estimator");
  CLI::App* ct_bar_single =
      constants->add_subcommand("bar-single", "one-window sojourn constant");
  CLI::App* ct_bar_joint =
      constants->add_subcommand("bar-joint", "two-window sojourn constant");
  CLI::App* ct_finite =
      constants->add_subcommand("finite-horizon", "finite-horizon joint constant");
  for (CLI::App* sub : {ct_pickands, ct_bar_single, ct_bar_joint, ct_finite}) {
    sub->add_option("--hurst", ct.hurst, "Hurst parameter")->capture_default_str();
    sub->add_option("--step", ct.step, "grid step")->capture_default_str();
    sub->add_option("--reps", ct.reps, "replicates")->capture_default_str();
    sub->add_option("--seed", ct.seed, "master seed")->capture_default_str();
    sub->add_option("--workers", ct.workers, "worker threads (0 = all cores)")
        ->capture_default_str();
    sub->add_option("--out", ct.out, "output JSON path (default stdout)");
  }
  ct_pickands->add_option("--span", ct.span, "window length S")->capture_default_str();
  ct_pickands->add_flag("--alpha2", ct.alpha2,
                        "degenerate-field validation path (exact value 1/sqrt(pi))");
  ct_bar_single->add_option("--t1", ct.t1, "window length")->capture_default_str();
  ct_bar_single->add_option("--x", ct.x, "sojourn threshold")->capture_default_str();
  for (CLI::App* sub : {ct_bar_joint, ct_finite}) {
    sub->add_option("--t1", ct.t1, "first window length")->capture_default_str();
    sub->add_option("--lambda", ct.lambda, "second-window drift offset")
        ->capture_default_str();
    sub->add_option("--t2", ct.t2, "second window start")->capture_default_str();
    sub->add_option("--t3", ct.t3, "second window end")->capture_default_str();
    sub->add_option("--x", ct.x, "first sojourn threshold")->capture_default_str();
    sub->add_option("--y", ct.y, "second sojourn threshold")->capture_default_str();
  }
  ct_finite->add_option("--span", ct.span, "supremum horizon S")->capture_default_str();
  ct_finite->add_flag("--paired", ct.paired,
                      "use the literal paired estimator instead of the product form");

  // -------------------------------------------------------------- c-constant
  struct {
    double t1 = 0.0, t2 = 1.0, x = 0.0, c = 1.0;
    std::string w = "inf";
    double step = 0.001953125;
    std::int64_t reps = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
  } cc;
  CLI::App* c_constant =
      app.add_subcommand("c-constant", "window constant for the Brownian approximations");
  c_constant->add_option("--t1", cc.t1, "window start")->capture_default_str();
  c_constant->add_option("--t2", cc.t2, "window end")->capture_default_str();
  c_constant->add_option("--x", cc.x, "sojourn threshold")->capture_default_str();
  c_constant->add_option("--w", cc.w, "cap level (number or 'inf')")->capture_default_str();
  c_constant->add_option("--c", cc.c, "drain rate")->capture_default_str();
  c_constant->add_option("--step", cc.step, "grid step")->capture_default_str();
  c_constant->add_option("--reps", cc.reps, "replicates")->capture_default_str();
  c_constant->add_option("--seed", cc.seed, "master seed")->capture_default_str();
  c_constant->add_option("--workers", cc.workers, "worker threads")->capture_default_str();
  c_constant->add_option("--out", cc.out, "output JSON path (default stdout)");

  // ------------------------------------------------------------- closed-form
  struct {
    double c = 1.0, u = 1.0, omega = 1.0, T = 1.0;
  } cf;
  CLI::App* closed_form = app.add_subcommand("closed-form", "exact Brownian-queue formulas");
  closed_form->require_subcommand(1);
  CLI::App* cf_q1 = closed_form->add_subcommand(
      "q1", "P(Q(T) > omega | Q(0) = u)");
  CLI::App* cf_q2 = closed_form->add_subcommand(
      "q2", "P(Q(T) > omega | Q(0) > u)");
  CLI::App* cf_tail = closed_form->add_subcommand("tail", "P(Q(0) > u)");
  for (CLI::App* sub : {cf_q1, cf_q2}) {
    sub->add_option("--c", cf.c, "drain rate")->capture_default_str();
    sub->add_option("--u", cf.u, "conditioning level")->capture_default_str();
    sub->add_option("--omega", cf.omega, "target level")->capture_default_str();
    sub->add_option("--T", cf.T, "elapsed time")->capture_default_str();
  }
  cf_tail->add_option("--c", cf.c, "drain rate")->capture_default_str();
  cf_tail->add_option("--u", cf.u, "level")->capture_default_str();

  // ------------------------------------------------------------------ asympt
  struct {
    double hurst = 0.5;
    double c = 1.0;
    double u = 1.0;
    double a = 0.5;
    double w = 0.3;
    double lambda = 0.0;
    double t1 = 1.0, t2 = 0.0, t3 = 1.0, x = 0.0, y = 0.0;
    double step = 0.0;  // 0 = automatic
    std::int64_t reps = 10000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
  } as;
  CLI::App* asympt = app.add_subcommand("asympt", "asymptotic formulas and envelopes");
  asympt->require_subcommand(1);
  CLI::App* as_constants =
      asympt->add_subcommand("constants", "A, B, t*, Delta(u), v(u)");
  CLI::App* as_thm1 = asympt->add_subcommand(
      "thm1", "limiting conditional probability (additive shift)");
  CLI::App* as_thm3 = asympt->add_subcommand(
      "thm3", "conditional-probability envelope (proportional shift)");
  CLI::App* as_p1 = asympt->add_subcommand(
      "p1", "small-shift Brownian approximation exp(-2cw) * C");
  CLI::App* as_p2 = asympt->add_subcommand(
      "p2", "large-shift Brownian approximation");
  as_constants->add_option("--hurst", as.hurst, "Hurst parameter")->capture_default_str();
  as_constants->add_option("--c", as.c, "drain rate")->capture_default_str();
  as_constants->add_option("--u", as.u, "level")->capture_default_str();
  for (CLI::App* sub : {as_thm1, as_thm3}) {
    sub->add_option("--hurst", as.hurst, "Hurst parameter")->capture_default_str();
    sub->add_option("--t1", as.t1, "first window scale")->capture_default_str();
    sub->add_option("--t2", as.t2, "second window start scale")->capture_default_str();
    sub->add_option("--t3", as.t3, "second window end scale")->capture_default_str();
    sub->add_option("--x", as.x, "first sojourn threshold")->capture_default_str();
    sub->add_option("--y", as.y, "second sojourn threshold")->capture_default_str();
    sub->add_option("--step", as.step, "constant-estimator grid step (0 = auto)")
        ->capture_default_str();
    sub->add_option("--reps", as.reps, "replicates")->capture_default_str();
    sub->add_option("--seed", as.seed, "master seed")->capture_default_str();
    sub->add_option("--workers", as.workers, "worker threads")->capture_default_str();
    sub->add_option("--out", as.out, "output JSON path (default stdout)");
  }
  as_thm1->add_option("--lambda", as.lambda, "second-window drift offset")
      ->capture_default_str();
  as_thm3->add_option("--c", as.c, "drain rate")->capture_default_str();
  as_thm3->add_option("--u", as.u, "level")->capture_default_str();
  as_thm3->add_option("--a", as.a, "proportional shift (omega = (1+a)u)")
      ->capture_default_str();
  for (CLI::App* sub : {as_p1, as_p2}) {
    sub->add_option("--c", as.c, "drain rate")->capture_default_str();
    sub->add_option("--t1", as.t1, "window start (absolute)")->capture_default_str();
    sub->add_option("--t2", as.t2, "window end (absolute)")->capture_default_str();
    sub->add_option("--x", as.x, "sojourn threshold")->capture_default_str();
    sub->add_option("--step", as.step, "grid step (0 = auto)")->capture_default_str();
    sub->add_option("--reps", as.reps, "replicates")->capture_default_str();
    sub->add_option("--seed", as.seed, "master seed")->capture_default_str();
    sub->add_option("--workers", as.workers, "worker threads")->capture_default_str();
    sub->add_option("--out", as.out, "output JSON path (default stdout)");
  }
  as_p1->add_option("--w", as.w, "additive shift (omega = u + w)")->capture_default_str();
  as_p2->add_option("--a", as.a, "proportional shift (omega = (1+a)u)")
      ->capture_default_str();
  as_p2->add_option("--u", as.u, "level")->capture_default_str();

  // ----------------------------------------------------------------- compare
  struct {
    std::string config;
  } cmp;
  CLI::App* compare =
      app.add_subcommand("compare", "run an experiment config: MC vs asymptotics");
  compare->add_option("--config", cmp.config, "experiment config JSON")->required();

  // ------------------------------------------------------------------ preset
  struct {
    std::string name;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::int64_t reps = 0;
    double step = 0.0;
    std::string out;
    int workers = 0;
    bool workers_set = false;
    bool emit_config = false;
  } pr;
  CLI::App* preset = app.add_subcommand("preset", "run a built-in experiment preset");
  preset->add_option("name", pr.name, "preset name, or 'list'")->required();
  preset->add_option("--seed", pr.seed, "override the preset seed")
      ->each([&pr](const std::string&) { pr.seed_set = true; });
  preset->add_option("--reps", pr.reps, "override the replicate count");
  preset->add_option("--step", pr.step, "override the grid step");
  preset->add_option("--out", pr.out, "output basename (writes BASE.csv and BASE.json)");
  preset->add_option("--workers", pr.workers, "worker threads (0 = all cores)")
      ->each([&pr](const std::string&) { pr.workers_set = true; });
  preset->add_flag("--emit-config", pr.emit_config,
                   "print the resolved config instead of running it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  return guarded([&]() -> int {
    if (app.got_subcommand(fbm_gen)) {
      const fbmq::HurstParam h(gen.hurst);
      const std::size_t count = static_cast<std::size_t>(gen.length / gen.step + 0.5) + 1;
      const fbmq::TimeGrid grid{0.0, gen.step, count};
      std::vector<std::vector<double>> paths;
      for (std::int64_t p = 0; p < gen.paths; ++p) {
        fbmq::Rng rng = fbmq::substream(gen.seed, static_cast<std::uint64_t>(p));
        paths.push_back(fbmq::sample_fbm(grid, h, rng).values);
      }
      emit(paths_csv(grid, paths), gen.out);
      return 0;
    }

    if (app.got_subcommand(queue_sim)) {
      const fbmq::QueueParams params{fbmq::HurstParam(qs.hurst), qs.drain};
      std::vector<std::vector<double>> paths;
      fbmq::TimeGrid grid{0.0, qs.step, 1};
      for (std::int64_t p = 0; p < qs.paths; ++p) {
        fbmq::Rng rng = fbmq::substream(qs.seed, static_cast<std::uint64_t>(p));
        fbmq::WorkloadPath wp;
        if (qs.q0 >= 0.0) {
          const std::size_t count =
              static_cast<std::size_t>(qs.window_end / qs.step + 0.5) + 1;
          const fbmq::TimeGrid driver_grid{0.0, qs.step, count};
          const fbmq::GaussianPath driver =
              fbmq::sample_fbm(driver_grid, params.hurst, rng);
          wp = fbmq::simulate_forward(params, qs.q0, driver);
        } else {
          wp = fbmq::simulate_stationary_window(params, qs.window_end, qs.horizon,
                                                qs.step, rng);
        }
        grid = wp.grid;
        paths.push_back(std::move(wp.values));
      }
      emit(paths_csv(grid, paths), qs.out);
      return 0;
    }

    if (app.got_subcommand(constants)) {
      fbmq::ConstantEstimate est;
      if (constants->got_subcommand(ct_pickands)) {
        est = ct.alpha2
                  ? fbmq::estimate_pickands_alpha_two(ct.span, ct.step, ct.reps, ct.seed,
                                                      ct.workers)
                  : fbmq::estimate_pickands(fbmq::HurstParam(ct.hurst), ct.span, ct.step,
                                            ct.reps, ct.seed, ct.workers);
      } else if (constants->got_subcommand(ct_bar_single)) {
        est = fbmq::estimate_bar_single(fbmq::HurstParam(ct.hurst), ct.t1, ct.x, ct.step,
                                        ct.reps, ct.seed, ct.workers);
      } else {
        const fbmq::BermanSpec spec{fbmq::HurstParam(ct.hurst), ct.t1, ct.lambda,
                                    ct.t2,  ct.t3,  ct.x, ct.y};
        if (constants->got_subcommand(ct_bar_joint)) {
          est = fbmq::estimate_bar_joint(spec, ct.step, ct.reps, ct.seed, ct.workers);
        } else if (ct.paired) {
          est = fbmq::estimate_finite_horizon_paired(spec, ct.span, ct.step, ct.reps,
                                                     ct.seed, ct.workers);
        } else {
          est = fbmq::estimate_finite_horizon_joint(spec, ct.span, ct.step, ct.reps,
                                                    ct.seed, ct.workers);
        }
      }
      emit(fbmq::to_json_string(est), ct.out);
      return 0;
    }

    if (app.got_subcommand(c_constant)) {
      const fbmq::CConstantSpec spec{cc.t1, cc.t2, cc.x, parse_w(cc.w), cc.c};
      const fbmq::CConstantEstimate est =
          fbmq::estimate_C(spec, cc.step, cc.reps, cc.seed, cc.workers);
      emit(window_constant_json(est).dump(2), cc.out);
      return 0;
    }

    if (app.got_subcommand(closed_form)) {
      double value = 0.0;
      if (closed_form->got_subcommand(cf_tail)) {
        value = fbmq::stationary_tail(cf.c, cf.u);
      } else {
        const fbmq::BmTransientQuery q{cf.c, cf.u, cf.omega, cf.T};
        value = closed_form->got_subcommand(cf_q1)
                    ? fbmq::transient_exceed_given_level(q)
                    : fbmq::transient_exceed_given_exceed(q);
      }
      std::printf("%.12g\n", value);
      return 0;
    }

    if (app.got_subcommand(asympt)) {
      if (asympt->got_subcommand(as_constants)) {
        const fbmq::DerivedConstants k =
            fbmq::derived_constants(fbmq::HurstParam(as.hurst), as.c, as.u);
        json j;
        j["A"] = k.A;
        j["B"] = k.B_const;
        j["t_star"] = k.t_star;
        j["delta_u"] = k.delta_u;
        j["v_u"] = k.v_u;
        emit(j.dump(2), as.out);
        return 0;
      }
      if (asympt->got_subcommand(as_thm1)) {
        const fbmq::HurstParam h(as.hurst);
        const double step =
            as.step > 0.0 ? as.step : fbmq::default_constant_step(as.t2, as.t3);
        const fbmq::ConstantEstimate bar_x = fbmq::estimate_bar_single(
            h, as.t1, as.x, step, as.reps, fbmq::derive_seed(as.seed, 1), as.workers);
        const fbmq::BermanSpec spec{h, as.t1, as.lambda, as.t2, as.t3, as.x, as.y};
        const fbmq::ConstantEstimate bar_xy = fbmq::estimate_bar_joint(
            spec, step, as.reps, fbmq::derive_seed(as.seed, 2), as.workers);
        json j;
        j["limit"] = fbmq::thm1_limit(bar_xy, bar_x);
        j["bar_single"] = json::parse(fbmq::to_json_string(bar_x));
        j["bar_joint"] = json::parse(fbmq::to_json_string(bar_xy));
        emit(j.dump(2), as.out);
        return 0;
      }
      if (asympt->got_subcommand(as_thm3)) {
        const fbmq::HurstParam h(as.hurst);
        const fbmq::SojournWindows windows{as.t1, as.t2, as.t3, as.x, as.y};
        json j;
        if (as.a < 0.0) {
          const fbmq::Thm3Envelope env =
              fbmq::thm3_envelope(h, as.c, as.u, as.a, windows, fbmq::Thm3Estimates{});
          j["decay"] = env.decay;
          j["lower"] = env.lower;
          j["upper"] = env.upper;
          j["log_rate"] = env.log_rate;
        } else {
          const double atilde =
              fbmq::regime_a_tilde(fbmq::FluctuationRegime::large_fbm(as.a), h);
          const double step =
              as.step > 0.0 ? as.step
                            : fbmq::default_constant_step(atilde * as.t2, atilde * as.t3);
          const fbmq::ConstantEstimate bar_x = fbmq::estimate_bar_single(
              h, as.t1, as.x, step, as.reps, fbmq::derive_seed(as.seed, 1), as.workers);
          const fbmq::ConstantEstimate bar_upper = fbmq::estimate_bar_single(
              h, atilde * (as.t3 - as.t2), atilde * as.y, step, as.reps,
              fbmq::derive_seed(as.seed, 2), as.workers);
          const fbmq::BermanSpec lower_spec{h,
                                            atilde * as.t1,
                                            0.0,
                                            atilde * as.t2,
                                            atilde * as.t3,
                                            atilde * as.x,
                                            atilde * as.y};
          const fbmq::ConstantEstimate bar_lower = fbmq::estimate_bar_joint(
              lower_spec, step, as.reps, fbmq::derive_seed(as.seed, 3), as.workers);
          fbmq::Thm3Estimates estimates;
          estimates.bar_x = &bar_x;
          estimates.bar_ay_upper = &bar_upper;
          estimates.bar_joint_lower = &bar_lower;
          const fbmq::Thm3Envelope env =
              fbmq::thm3_envelope(h, as.c, as.u, as.a, windows, estimates);
          j["decay"] = env.decay;
          j["lower"] = env.lower;
          j["upper"] = env.upper;
          j["log_rate"] = env.log_rate;
          j["bar_single"] = json::parse(fbmq::to_json_string(bar_x));
          j["bar_upper"] = json::parse(fbmq::to_json_string(bar_upper));
          j["bar_joint_lower"] = json::parse(fbmq::to_json_string(bar_lower));
        }
        emit(j.dump(2), as.out);
        return 0;
      }
      // p1 / p2
      const double step = as.step > 0.0 ? as.step : 0.001953125;
      if (asympt->got_subcommand(as_p1)) {
        const fbmq::CConstantSpec spec{as.t1, as.t2, as.x, as.w, as.c};
        const fbmq::CConstantEstimate est =
            fbmq::estimate_C(spec, step, as.reps, as.seed, as.workers);
        json j;
        j["approx"] = fbmq::prop1_approx(as.c, as.w, est);
        j["constant"] = window_constant_json(est);
        emit(j.dump(2), as.out);
        return 0;
      }
      const double omega = (1.0 + as.a) * as.u;
      json j;
      if (as.a > 0.0) {
        const fbmq::CConstantSpec spec{as.t1, as.t2, as.x,
                                       fbmq::CConstantSpec::infinite_w(), as.c};
        const fbmq::CConstantEstimate est =
            fbmq::estimate_C(spec, step, as.reps, as.seed, as.workers);
        j["approx"] = fbmq::prop2_approx(as.c, as.a, as.u, omega, &est);
        j["constant"] = window_constant_json(est);
      } else {
        j["approx"] = fbmq::prop2_approx(as.c, as.a, as.u, omega, nullptr);
      }
      emit(j.dump(2), as.out);
      return 0;
    }

    if (app.got_subcommand(compare)) {
      return fbmq::run_experiment(cmp.config);
    }

    if (app.got_subcommand(preset)) {
      if (pr.name == "list") {
        for (const std::string& name : fbmq::preset_names()) {
          std::printf("%s\n", name.c_str());
        }
        return 0;
      }
      fbmq::ExperimentConfig cfg = fbmq::preset_config(pr.name);
      if (pr.seed_set) cfg.mc.seed = pr.seed;
      if (pr.reps > 0) cfg.mc.reps = pr.reps;
      if (pr.step > 0.0) cfg.mc.step = pr.step;
      if (pr.workers_set) cfg.mc.workers = pr.workers;
      if (!pr.out.empty()) {
        cfg.outputs.csv_path = pr.out + ".csv";
        cfg.outputs.json_path = pr.out + ".json";
      }
      if (pr.emit_config) {
        emit(fbmq::config_to_json(cfg), "");
        return 0;
      }
      const int code = fbmq::run_experiment(cfg);
      if (code == 0) {
        std::printf("wrote %s and %s\n", cfg.outputs.csv_path.c_str(),
                    cfg.outputs.json_path.c_str());
      }
      return code;
    }

    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  });
}
