// fsoacq batch front end: structured JSON config in, figure-ready CSV out,
// one subcommand per study. Every run writes <name>.csv plus a <name>.json
// sidecar carrying the resolved config, its hash, and derived scalars.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsoacq/acqtime.hpp"
#include "fsoacq/beam.hpp"
#include "fsoacq/config.hpp"
#include "fsoacq/csv.hpp"
#include "fsoacq/detector.hpp"
#include "fsoacq/geometry.hpp"
#include "fsoacq/montecarlo.hpp"
#include "fsoacq/numeric.hpp"
#include "fsoacq/optimize.hpp"
#include "fsoacq/scan.hpp"
#include "fsoacq/stats.hpp"
#include "fsoacq/whiten.hpp"

namespace {

using fsoacq::ConfigError;
using fsoacq::InfeasibleError;
using fsoacq::RunConfig;
using nlohmann::json;

struct RunContext {
  RunConfig cfg;
  std::filesystem::path out_dir;
};

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::vector<int> cells_per_side;  // acq-pdf / acq-ccdf only
};

std::filesystem::path resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("FSOACQ_OUT_DIR"); env != nullptr && env[0] != '\0') {
    return env;
  }
  return "out";
}

RunContext make_context(const CliOptions& opt) {
  RunContext ctx;
  ctx.cfg = fsoacq::load_run_config(opt.config_path);
  if (opt.seed) ctx.cfg.mc.seed = *opt.seed;
  if (opt.threads) {
    if (*opt.threads < 1) throw ConfigError("--threads", "expected >= 1");
    ctx.cfg.mc.threads = *opt.threads;
  }
  ctx.out_dir = resolve_out_dir(opt.out_dir);
  std::filesystem::create_directories(ctx.out_dir);
  return ctx;
}

void write_outputs(const RunContext& ctx, const std::string& subcommand,
                   const fsoacq::CsvWriter& csv, const json& derived) {
  const auto csv_path = ctx.out_dir / (subcommand + ".csv");
  csv.write_file(csv_path.string());

  json sidecar;
  sidecar["subcommand"] = subcommand;
  sidecar["config"] = json::parse(fsoacq::resolved_json_text(ctx.cfg));
  sidecar["config_hash"] = fsoacq::config_hash_hex(ctx.cfg);
  sidecar["derived"] = derived;
  sidecar["outputs"] = {{"csv", csv_path.filename().string()}};
  std::ofstream f(ctx.out_dir / (subcommand + ".json"), std::ios::binary);
  if (!f) throw std::runtime_error("cannot write sidecar");
  f << sidecar.dump(2) << "\n";
  std::cout << subcommand << ": wrote " << csv_path.string() << " (" << csv.row_count()
            << " rows)\n";
}

const fsoacq::ScanConfig& need_scan(const RunConfig& cfg) {
  if (!cfg.scan) throw ConfigError("scan", "this subcommand needs the scan block");
  return *cfg.scan;
}

double need_sigma0(const RunConfig& cfg) {
  if (!cfg.sigma0_m) {
    throw ConfigError("uncertainty.sigma0_m", "this subcommand needs the uncertainty block");
  }
  return *cfg.sigma0_m;
}

const fsoacq::SweepConfig& need_sweep(const RunConfig& cfg, const std::string& variable) {
  if (!cfg.sweep || cfg.sweep->variable != variable) {
    throw ConfigError("sweep", "this subcommand needs sweep.variable == \"" + variable + "\"");
  }
  return *cfg.sweep;
}

/// gamma0 from whichever detection field was supplied. Calibration targets
/// use the noise-side moments of the assumed-beam detector; the scan-level
/// target additionally needs the scan geometry for the dwell count.
double resolve_gamma0(const RunConfig& cfg, const fsoacq::ArrayGeometry& geom,
                      const fsoacq::ChannelParams& chan) {
  if (cfg.detection.gamma0) return *cfg.detection.gamma0;
  if (cfg.detection.gamma) {
    return *cfg.detection.gamma +
           fsoacq::photon_count_factor(chan) * cfg.assumed_beam.power_W;
  }
  const auto weights = fsoacq::detector_weights(geom, cfg.assumed_beam, chan);
  const auto mom = fsoacq::compute_moments(geom, cfg.beam, chan, weights);
  if (cfg.detection.target_pf) {
    return fsoacq::calibrate_threshold(mom, *cfg.detection.target_pf);
  }
  const auto& scan = need_scan(cfg);
  const auto pack =
      fsoacq::packing_counts(fsoacq::array_area(geom), geom.side_m, cfg.beam.rho_m);
  const auto n_steps = fsoacq::steps_per_scan(scan.ru_m, cfg.beam.rho_m);
  const double n_eff = static_cast<double>(n_steps - pack.full_overlap_floor);
  if (n_eff <= 0.0) {
    throw InfeasibleError("scan has no steps beyond the full-overlap floor");
  }
  const double per_pulse = -std::expm1(std::log1p(-*cfg.detection.target_pfu) / n_eff);
  return fsoacq::calibrate_threshold(mom, per_pulse);
}

fsoacq::TrialConfig make_trials(const RunConfig& cfg, double gamma0) {
  fsoacq::TrialConfig t;
  t.geom = cfg.geom;
  t.true_beam = cfg.beam;
  t.assumed_beam = cfg.assumed_beam;
  t.chan = cfg.chan;
  t.gamma0 = gamma0;
  t.seed = cfg.mc.seed;
  t.n_trials = cfg.mc.trials;
  t.n_threads = cfg.mc.threads;
  return t;
}

std::string flag(bool b) { return b ? "1" : "0"; }

// ---------------------------------------------------------------- subcommands

void run_approx_compare(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& sweep = need_sweep(cfg, "gamma0");
  const auto weights = fsoacq::detector_weights(cfg.geom, cfg.assumed_beam, cfg.chan);
  const auto mom = fsoacq::compute_moments(cfg.geom, cfg.beam, cfg.chan, weights);

  fsoacq::CsvWriter csv({"gamma0", "pm_gaussian", "pm_scaled_poisson", "pf_scaled_poisson",
                         "pm_mc", "pm_mc_half_width_95", "pm_mc_events", "pm_mc_censored",
                         "pf_mc", "pf_mc_half_width_95", "pf_mc_events", "pf_mc_censored"});
  for (double g0 : sweep.grid) {
    auto trials = make_trials(cfg, g0);
    const auto pm = fsoacq::estimate_pm(trials);
    const auto pf = fsoacq::estimate_pf(trials);
    csv.add_row({fsoacq::csv_num(g0), fsoacq::csv_num(fsoacq::pm_gaussian(mom, g0)),
                 fsoacq::csv_num(fsoacq::pm_scaled_poisson(mom, g0)),
                 fsoacq::csv_num(fsoacq::pf_scaled_poisson(mom, g0)),
                 fsoacq::csv_num(pm.estimate), fsoacq::csv_num(pm.half_width_95),
                 fsoacq::csv_uint(pm.events), flag(pm.censored), fsoacq::csv_num(pf.estimate),
                 fsoacq::csv_num(pf.half_width_95), fsoacq::csv_uint(pf.events),
                 flag(pf.censored)});
  }
  json derived = {{"mu_s", mom.mu_s},       {"var_s", mom.var_s}, {"mu_n", mom.mu_n},
                  {"var_n", mom.var_n},     {"k_s", mom.k_s},     {"k_n", mom.k_n},
                  {"trials", cfg.mc.trials}};
  write_outputs(ctx, "approx-compare", csv, derived);
}

void run_pm_bounds(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& scan = need_scan(cfg);
  const double sigma0 = need_sigma0(cfg);
  std::vector<double> noise_grid = {cfg.noise_value};
  if (cfg.sweep) {
    if (cfg.sweep->variable != "noise_value") {
      throw ConfigError("sweep.variable", "pm-bounds sweeps noise_value only");
    }
    noise_grid = cfg.sweep->grid;
  }
  const auto pack = fsoacq::packing_counts(fsoacq::array_area(cfg.geom), cfg.geom.side_m,
                                           cfg.beam.rho_m);
  const auto n_steps = fsoacq::steps_per_scan(scan.ru_m, cfg.beam.rho_m);
  const auto plan = fsoacq::build_spiral(scan.ru_m, cfg.beam.rho_m, scan.overlap);

  fsoacq::CsvWriter csv(
      {"noise_value", "noise_intensity_W_m2", "gamma0", "pm_point", "pm_scan_lower",
       "pm_scan_upper", "pm_scan_mc", "pm_scan_mc_half_width_95", "pm_scan_mc_events",
       "pm_scan_mc_censored", "pf_point", "pfu_lower", "pfu_upper", "n_steps", "n0", "n1",
       "n_floor"});
  for (double noise : noise_grid) {
    RunConfig point = cfg;
    point.noise_value = noise;
    point.chan.noise_intensity_W_m2 =
        fsoacq::noise_intensity_from(cfg.noise_convention, noise, cfg.geom);
    const double g0 = resolve_gamma0(point, point.geom, point.chan);
    const auto weights = fsoacq::detector_weights(point.geom, point.assumed_beam, point.chan);
    const auto mom = fsoacq::compute_moments(point.geom, point.beam, point.chan, weights);
    const double pm = fsoacq::pm_scaled_poisson(mom, g0);
    const double pf = fsoacq::pf_scaled_poisson(mom, g0);
    const auto pm_bounds = fsoacq::pm_scan_bounds(pm, pack);
    const auto pfu = fsoacq::pf_scan_bounds(pf, n_steps, pack);
    const auto scan_mc = fsoacq::estimate_scan_pm(make_trials(point, g0), plan, sigma0);
    csv.add_row({fsoacq::csv_num(noise), fsoacq::csv_num(point.chan.noise_intensity_W_m2),
                 fsoacq::csv_num(g0), fsoacq::csv_num(pm), fsoacq::csv_num(pm_bounds.lower),
                 fsoacq::csv_num(pm_bounds.upper), fsoacq::csv_num(scan_mc.estimate),
                 fsoacq::csv_num(scan_mc.half_width_95), fsoacq::csv_uint(scan_mc.events),
                 flag(scan_mc.censored), fsoacq::csv_num(pf), fsoacq::csv_num(pfu.lower),
                 fsoacq::csv_num(pfu.upper), fsoacq::csv_int(n_steps),
                 fsoacq::csv_int(pack.n0), fsoacq::csv_int(pack.n1),
                 fsoacq::csv_int(pack.full_overlap_floor)});
  }
  json derived = {{"n_steps", n_steps},
                  {"n0", pack.n0},
                  {"n1", pack.n1},
                  {"n_floor", pack.full_overlap_floor},
                  {"floor_valid", pack.floor_valid},
                  {"plan_points", plan.points.size()},
                  {"scan_trials", cfg.mc.trials}};
  write_outputs(ctx, "pm-bounds", csv, derived);
}

void run_sensitivity(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.sweep) throw ConfigError("sweep", "sensitivity needs a sweep block");
  fsoacq::SweepParam param;
  if (cfg.sweep->variable == "assumed_power_W") {
    param = fsoacq::SweepParam::AssumedPower;
  } else if (cfg.sweep->variable == "assumed_rho_m") {
    param = fsoacq::SweepParam::AssumedRho;
  } else if (cfg.sweep->variable == "assumed_x0_m") {
    param = fsoacq::SweepParam::AssumedX0;
  } else {
    throw ConfigError("sweep.variable",
                      "sensitivity sweeps assumed_power_W, assumed_rho_m, or assumed_x0_m");
  }
  const double g0 = resolve_gamma0(cfg, cfg.geom, cfg.chan);
  const auto rows = fsoacq::sensitivity_sweep(make_trials(cfg, g0), param, cfg.sweep->grid);

  fsoacq::CsvWriter csv({"value", "pm_mc", "pm_mc_half_width_95", "pm_mc_upper_95",
                         "pm_mc_events", "pm_mc_censored", "pf_mc", "pf_mc_half_width_95",
                         "pf_mc_upper_95", "pf_mc_events", "pf_mc_censored"});
  for (const auto& r : rows) {
    csv.add_row({fsoacq::csv_num(r.value), fsoacq::csv_num(r.pm.estimate),
                 fsoacq::csv_num(r.pm.half_width_95), fsoacq::csv_num(r.pm.upper_bound_95),
                 fsoacq::csv_uint(r.pm.events), flag(r.pm.censored),
                 fsoacq::csv_num(r.pf.estimate), fsoacq::csv_num(r.pf.half_width_95),
                 fsoacq::csv_num(r.pf.upper_bound_95), fsoacq::csv_uint(r.pf.events),
                 flag(r.pf.censored)});
  }
  json derived = {{"gamma0", g0}, {"variable", cfg.sweep->variable}, {"trials", cfg.mc.trials}};
  write_outputs(ctx, "sensitivity", csv, derived);
}

fsoacq::RhoProblem make_rho_problem(const RunConfig& cfg) {
  if (!cfg.detection.target_pfu) {
    throw ConfigError("detection.target_pfu",
                      "rho subcommands calibrate to a scan-level false-alarm target");
  }
  const auto& scan = need_scan(cfg);
  fsoacq::RhoProblem prob;
  prob.geom = cfg.geom;
  prob.beam = cfg.beam;
  prob.chan = cfg.chan;
  prob.ru_m = scan.ru_m;
  prob.td_s = fsoacq::dwell_time(scan.receiver_processing_s, scan.range_m, scan.observation_s);
  prob.sigma0_m = need_sigma0(cfg);
  prob.target_pfu = *cfg.detection.target_pfu;
  if (cfg.rho_min_m) prob.rho_min_m = *cfg.rho_min_m;
  if (cfg.rho_max_m) prob.rho_max_m = *cfg.rho_max_m;
  return prob;
}

void add_objective_row(fsoacq::CsvWriter& csv, double key, const fsoacq::RhoObjective& o,
                       int n_evaluations) {
  csv.add_row({fsoacq::csv_num(key), fsoacq::csv_num(o.rho_m), fsoacq::csv_num(o.value_s),
               fsoacq::csv_num(o.gamma0), fsoacq::csv_num(o.g), fsoacq::csv_num(o.exponent),
               fsoacq::csv_num(o.pfu_achieved), flag(o.feasible),
               fsoacq::csv_int(n_evaluations)});
}

void run_rho_objective(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto prob = make_rho_problem(cfg);
  std::vector<double> grid;
  if (cfg.sweep) {
    if (cfg.sweep->variable != "rho_m") {
      throw ConfigError("sweep.variable", "rho-objective sweeps rho_m only");
    }
    grid = cfg.sweep->grid;
  } else {
    const double hi = prob.rho_max_m > 0.0 ? prob.rho_max_m
                                           : fsoacq::rho_exponent_limit(prob.geom);
    const double lo = prob.rho_min_m > 0.0 ? prob.rho_min_m : hi / 64.0;
    for (int i = 0; i < 64; ++i) grid.push_back(lo + (hi - lo) * i / 63.0);
  }
  fsoacq::CsvWriter csv({"rho_m", "rho_eval_m", "value_s", "gamma0", "g", "exponent",
                         "pfu_achieved", "feasible", "n_evaluations"});
  int n_feasible = 0;
  for (double rho : grid) {
    const auto o = fsoacq::rho_objective(prob, rho);
    n_feasible += o.feasible ? 1 : 0;
    add_objective_row(csv, rho, o, 1);
  }
  json derived = {{"rho_exponent_limit_m", fsoacq::rho_exponent_limit(prob.geom)},
                  {"td_s", prob.td_s},
                  {"n_feasible", n_feasible}};
  write_outputs(ctx, "rho-objective", csv, derived);
  if (n_feasible == 0) throw InfeasibleError("no feasible rho in the requested grid");
}

void run_rho_optimize(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  auto prob = make_rho_problem(cfg);
  fsoacq::CsvWriter csv({"noise_value", "rho_star_m", "value_s", "gamma0", "g", "exponent",
                         "pfu_achieved", "feasible", "n_evaluations"});
  int n_feasible = 0;
  json derived;
  if (cfg.sweep) {
    if (cfg.sweep->variable != "noise_value") {
      throw ConfigError("sweep.variable", "rho-optimize sweeps noise_value only");
    }
    std::vector<double> intensities;
    for (double v : cfg.sweep->grid) {
      intensities.push_back(fsoacq::noise_intensity_from(cfg.noise_convention, v, cfg.geom));
    }
    const auto rows = fsoacq::sweep_noise(prob, intensities);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      n_feasible += r.result.best.feasible ? 1 : 0;
      fsoacq::RhoObjective o = r.result.best;
      // Report the optimum under its config-convention noise value.
      csv.add_row({fsoacq::csv_num(cfg.sweep->grid[i]), fsoacq::csv_num(o.rho_m),
                   fsoacq::csv_num(o.value_s), fsoacq::csv_num(o.gamma0), fsoacq::csv_num(o.g),
                   fsoacq::csv_num(o.exponent), fsoacq::csv_num(o.pfu_achieved),
                   flag(o.feasible), fsoacq::csv_int(r.result.n_evaluations)});
    }
    derived["points"] = rows.size();
  } else {
    const auto res = fsoacq::minimize_rho(prob);
    n_feasible += res.best.feasible ? 1 : 0;
    add_objective_row(csv, cfg.noise_value, res.best, res.n_evaluations);
    derived["points"] = 1;
  }
  derived["rho_exponent_limit_m"] = fsoacq::rho_exponent_limit(prob.geom);
  derived["td_s"] = prob.td_s;
  derived["n_feasible"] = n_feasible;
  write_outputs(ctx, "rho-optimize", csv, derived);
  if (n_feasible == 0) throw InfeasibleError("no feasible rho in the search interval");
}

struct AcqColumn {
  int cells_per_side = 0;
  fsoacq::AcqTimeModel model;
  double gamma0 = 0.0;
  double pm = 0.0;
  double g = 0.0;
  double exponent = 0.0;
  double mean_bound_s = 0.0;
};

std::vector<AcqColumn> make_acq_columns(const RunConfig& cfg,
                                        const std::vector<int>& cells_list, double td_s,
                                        double sigma0) {
  const auto& scan = *cfg.scan;
  std::vector<AcqColumn> cols;
  for (int n : cells_list) {
    AcqColumn c;
    c.cells_per_side = n;
    const auto geom = fsoacq::make_array_geometry(n, cfg.geom.side_m);
    RunConfig local = cfg;
    local.geom = geom;
    c.gamma0 = resolve_gamma0(local, geom, cfg.chan);
    const auto weights = fsoacq::detector_weights(geom, cfg.assumed_beam, cfg.chan);
    const auto mom = fsoacq::compute_moments(geom, cfg.beam, cfg.chan, weights);
    const auto bound = fsoacq::mean_acq_time_upper_bound(
        fsoacq::array_area(geom), geom.side_m, mom, c.gamma0, scan.ru_m, td_s, sigma0,
        cfg.beam.rho_m);
    c.g = bound.g;
    c.exponent = bound.exponent;
    c.mean_bound_s = bound.value_s;
    // The T_U model's scan-failure probability is the scan-level upper bound
    // pm^floor (the loosened G^e only enters the mean bound).
    const auto pack = fsoacq::packing_counts(fsoacq::array_area(geom), geom.side_m,
                                             cfg.beam.rho_m);
    if (!pack.floor_valid) {
      throw InfeasibleError("beam too large for the packing-based scan bound");
    }
    c.pm = fsoacq::pm_scaled_poisson(mom, c.gamma0);
    const double p = fsoacq::pm_scan_bounds(c.pm, pack).upper;
    const double ts = scan.region_scale_a *
                      static_cast<double>(fsoacq::steps_per_scan(scan.ru_m, cfg.beam.rho_m)) *
                      td_s;
    c.model = fsoacq::make_acq_model(p, ts, td_s, cfg.beam.rho_m, sigma0);
    cols.push_back(c);
  }
  return cols;
}

std::vector<double> make_time_grid(const RunConfig& cfg, const std::vector<AcqColumn>& cols) {
  if (cfg.sweep) {
    if (cfg.sweep->variable != "time_s") {
      throw ConfigError("sweep.variable", "acq subcommands sweep time_s only");
    }
    return cfg.sweep->grid;
  }
  double t_max = 0.0;
  for (const auto& c : cols) t_max = std::max(t_max, 4.0 * c.mean_bound_s);
  std::vector<double> grid;
  for (int i = 0; i <= 480; ++i) grid.push_back(t_max * i / 480.0);
  return grid;
}

json acq_derived(const std::vector<AcqColumn>& cols, double td_s) {
  json per_m = json::array();
  for (const auto& c : cols) {
    per_m.push_back({{"cells_per_side", c.cells_per_side},
                     {"cells", c.cells_per_side * c.cells_per_side},
                     {"gamma0", c.gamma0},
                     {"pm_single_step", c.pm},
                     {"g", c.g},
                     {"exponent", c.exponent},
                     {"p_scan_miss", c.model.p},
                     {"ts_s", c.model.ts_s},
                     {"beta", c.model.beta},
                     {"mean_bound_s", c.mean_bound_s}});
  }
  return {{"td_s", td_s}, {"columns", per_m}};
}

void run_acq_curve(const RunContext& ctx, const std::vector<int>& cells_flag, bool ccdf) {
  const auto& cfg = ctx.cfg;
  const auto& scan = need_scan(cfg);
  const double sigma0 = need_sigma0(cfg);
  const double td =
      fsoacq::dwell_time(scan.receiver_processing_s, scan.range_m, scan.observation_s);
  std::vector<int> cells_list = cells_flag;
  if (cells_list.empty()) cells_list = {cfg.geom.cells_per_side};

  const auto cols = make_acq_columns(cfg, cells_list, td, sigma0);
  const auto grid = make_time_grid(cfg, cols);

  std::vector<std::string> header = {"t_s"};
  for (const auto& c : cols) {
    header.push_back((ccdf ? "ccdf_M" : "pdf_M") +
                     std::to_string(c.cells_per_side * c.cells_per_side));
  }
  fsoacq::CsvWriter csv(header);
  for (double t : grid) {
    std::vector<std::string> row = {fsoacq::csv_num(t)};
    for (const auto& c : cols) {
      row.push_back(fsoacq::csv_num(ccdf ? fsoacq::ccdf_acq_time(c.model, t)
                                         : fsoacq::pdf_acq_time(c.model, t)));
    }
    csv.add_row(row);
  }
  write_outputs(ctx, ccdf ? "acq-ccdf" : "acq-pdf", csv, acq_derived(cols, td));
}

void run_scan_plan(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& scan = need_scan(cfg);
  const auto plan = fsoacq::build_spiral(scan.ru_m, cfg.beam.rho_m, scan.overlap);
  fsoacq::CsvWriter csv({"index", "r_m", "theta_rad", "x_m", "y_m"});
  for (std::size_t i = 0; i < plan.points.size(); ++i) {
    const auto& p = plan.points[i];
    csv.add_row({fsoacq::csv_uint(i), fsoacq::csv_num(p.r_m), fsoacq::csv_num(p.theta_rad),
                 fsoacq::csv_num(p.x_m), fsoacq::csv_num(p.y_m)});
  }
  const double td =
      fsoacq::dwell_time(scan.receiver_processing_s, scan.range_m, scan.observation_s);
  json derived = {{"n_points", plan.points.size()},
                  {"b_m", plan.b_m},
                  {"step_m", plan.step_m},
                  {"steps_per_scan_bound", fsoacq::steps_per_scan(scan.ru_m, cfg.beam.rho_m)},
                  {"dwell_time_s", td},
                  {"planned_scan_duration_s", td * static_cast<double>(plan.points.size())}};
  write_outputs(ctx, "scan-plan", csv, derived);
}

void run_whiten_check(const RunContext& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.whiten) throw ConfigError("whiten", "whiten-check needs the whiten block");
  const fsoacq::Cov2 cov{cfg.whiten->cov_xx_m2, cfg.whiten->cov_xy_m2, cfg.whiten->cov_yy_m2};
  const double scale = cfg.whiten->sigma_scale;
  const auto w = fsoacq::whitening_transform(cov);
  const auto mass =
      fsoacq::verify_probability_preservation(cov, scale, cfg.mc.trials, cfg.mc.seed);
  const double radius = fsoacq::whitened_region_radius(cov, scale);
  const double td = cfg.scan ? fsoacq::dwell_time(cfg.scan->receiver_processing_s,
                                                  cfg.scan->range_m, cfg.scan->observation_s)
                             : 1e-3;
  const double rho = cfg.beam.rho_m;

  fsoacq::CsvWriter csv({"cov_xx_m2", "cov_xy_m2", "cov_yy_m2", "sigma_scale", "lambda_max",
                         "lambda_min", "det_t", "sigma_prime", "region_radius_m",
                         "mass_original", "mass_transformed", "mass_diff",
                         "mass_diff_half_width_95", "scan_time_nominal_s",
                         "scan_time_bound_s", "covering_dwells"});
  csv.add_row({fsoacq::csv_num(cov.xx), fsoacq::csv_num(cov.xy), fsoacq::csv_num(cov.yy),
               fsoacq::csv_num(scale), fsoacq::csv_num(w.lambda_max),
               fsoacq::csv_num(w.lambda_min), fsoacq::csv_num(w.det_t),
               fsoacq::csv_num(w.sigma_prime), fsoacq::csv_num(radius),
               fsoacq::csv_num(mass.mass_original), fsoacq::csv_num(mass.mass_transformed),
               fsoacq::csv_num(mass.diff), fsoacq::csv_num(mass.half_width_95),
               fsoacq::csv_num(fsoacq::scan_time_bound(cov, scale, rho, td, 1.0)),
               fsoacq::csv_num(fsoacq::scan_time_bound(cov, scale, rho, td, 2.0)),
               fsoacq::csv_int(fsoacq::covering_dwell_count(
                   3.14159265358979323846 * radius * radius, rho))});
  json derived = {{"t", {{w.t[0][0], w.t[0][1]}, {w.t[1][0], w.t[1][1]}}},
                  {"td_s", td},
                  {"trials", cfg.mc.trials}};
  write_outputs(ctx, "whiten-check", csv, derived);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FSO beacon-acquisition study runner"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON run configuration")->required();
  app.add_option("--out", opt.out_dir, "output directory (default $FSOACQ_OUT_DIR or ./out)");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "override mc.seed");
  int threads_flag = 0;
  auto* threads_opt = app.add_option("--threads", threads_flag, "override mc.threads");

  auto* approx = app.add_subcommand("approx-compare",
                                    "closed-form P_m/P_f approximations vs Monte Carlo");
  auto* bounds = app.add_subcommand("pm-bounds", "scan-level missed-detection bounds vs MC");
  auto* sens = app.add_subcommand("sensitivity", "P_m/P_f under assumed-parameter mismatch");
  auto* robj = app.add_subcommand("rho-objective", "mean-time bound across beam radii");
  auto* ropt = app.add_subcommand("rho-optimize", "optimal beam radius (optionally vs noise)");
  auto* apdf = app.add_subcommand("acq-pdf", "acquisition-time density");
  auto* accdf = app.add_subcommand("acq-ccdf", "acquisition-time CCDF");
  auto* splan = app.add_subcommand("scan-plan", "spiral dwell positions");
  auto* wcheck = app.add_subcommand("whiten-check", "whitening transform diagnostics");
  for (auto* c : {approx, bounds, sens, robj, ropt, apdf, accdf, splan, wcheck}) {
    c->fallthrough();  // accept the global flags after the subcommand name too
  }
  for (auto* c : {apdf, accdf}) {
    c->add_option("--cells-per-side,-M", opt.cells_per_side,
                  "one curve per detector-array size (default: config geometry)");
  }

  CLI11_PARSE(app, argc, argv);
  if (*seed_opt) opt.seed = seed_flag;
  if (*threads_opt) opt.threads = threads_flag;

  try {
    const RunContext ctx = make_context(opt);
    if (approx->parsed()) run_approx_compare(ctx);
    if (bounds->parsed()) run_pm_bounds(ctx);
    if (sens->parsed()) run_sensitivity(ctx);
    if (robj->parsed()) run_rho_objective(ctx);
    if (ropt->parsed()) run_rho_optimize(ctx);
    if (apdf->parsed()) run_acq_curve(ctx, opt.cells_per_side, false);
    if (accdf->parsed()) run_acq_curve(ctx, opt.cells_per_side, true);
    if (splan->parsed()) run_scan_plan(ctx);
    if (wcheck->parsed()) run_whiten_check(ctx);
  } catch (const ConfigError& e) {
    json err = {{"error", "validation"}, {"path", e.path()}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    json err = {{"error", "infeasible"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    json err = {{"error", "infeasible"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    json err = {{"error", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 0;
}
