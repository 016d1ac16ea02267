#include "fsoacq/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fsoacq {
namespace {

using nlohmann::json;

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (ok.count(item.key()) == 0) {
      throw ConfigError(join_path(path, item.key()), "unknown field");
    }
  }
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const std::string p = join_path(path, key);
  if (!obj.contains(key)) throw ConfigError(p, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(p, "expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& path, const char* key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join_path(path, key), "expected a number");
  return v.get<double>();
}

std::optional<double> get_optional_number(const json& obj, const std::string& path,
                                          const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join_path(path, key), "expected a number");
  return v.get<double>();
}

std::uint64_t get_uint_or(const json& obj, const std::string& path, const char* key,
                          std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(join_path(path, key), "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const std::string p = join_path(path, key);
  if (!obj.contains(key)) throw ConfigError(p, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(p, "expected a string");
  return v.get<std::string>();
}

ArrayGeometry parse_geometry(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"cells_per_side", "side_m"});
  const double n = get_number(j, path, "cells_per_side");
  if (n < 1.0 || n != std::floor(n)) {
    throw ConfigError(join_path(path, "cells_per_side"), "expected a positive integer");
  }
  const double side = get_number(j, path, "side_m");
  try {
    return make_array_geometry(static_cast<int>(n), side);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

// `fallback` supplies defaults for optional fields; for the true beam the
// fallback is a zero-centered template and power/size are required.
BeamParams parse_beam(const json& j, const std::string& path, const BeamParams* fallback,
                      double wavelength_m, double range_m) {
  require_object(j, path);
  reject_unknown(j, path, {"power_W", "rho_m", "rho0_m", "x0_m", "y0_m"});
  BeamParams b;
  const bool has_rho = j.contains("rho_m");
  const bool has_rho0 = j.contains("rho0_m");
  if (has_rho && has_rho0) {
    throw ConfigError(path, "give exactly one of rho_m and rho0_m");
  }
  if (fallback == nullptr) {
    b.power_W = get_number(j, path, "power_W");
    if (!has_rho && !has_rho0) {
      throw ConfigError(path, "give exactly one of rho_m and rho0_m");
    }
    b.x0_m = get_number_or(j, path, "x0_m", 0.0);
    b.y0_m = get_number_or(j, path, "y0_m", 0.0);
  } else {
    b = *fallback;
    b.power_W = get_number_or(j, path, "power_W", fallback->power_W);
    b.x0_m = get_number_or(j, path, "x0_m", fallback->x0_m);
    b.y0_m = get_number_or(j, path, "y0_m", fallback->y0_m);
  }
  if (has_rho) {
    b.rho_m = get_number(j, path, "rho_m");
  } else if (has_rho0) {
    const double rho0 = get_number(j, path, "rho0_m");
    if (range_m <= 0.0) {
      throw ConfigError(join_path(path, "rho0_m"),
                        "rho0_m needs scan.range_m > 0 to place the footprint");
    }
    b.rho_m = beam_radius(rho0, wavelength_m, range_m);
  }
  try {
    validate(b);
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  return b;
}

}  // namespace

double noise_intensity_from(const std::string& convention, double value,
                            const ArrayGeometry& geom) {
  if (convention == "intensity_W_m2") return value;
  if (convention == "total_power_W") return value / array_area(geom);
  throw ConfigError("channel.noise_convention",
                    "expected \"total_power_W\" or \"intensity_W_m2\"");
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  require_object(root, "$");
  reject_unknown(root, "", {"scenario", "geometry", "beam", "assumed_beam", "channel",
                            "scan", "uncertainty", "detection", "sweep", "whiten", "mc",
                            "rho_opt"});

  RunConfig cfg;
  if (root.contains("scenario")) {
    if (!root.at("scenario").is_string()) throw ConfigError("scenario", "expected a string");
    cfg.scenario = root.at("scenario").get<std::string>();
  }

  if (!root.contains("geometry")) throw ConfigError("geometry", "missing required block");
  cfg.geom = parse_geometry(root.at("geometry"), "geometry");

  if (!root.contains("channel")) throw ConfigError("channel", "missing required block");
  {
    const json& j = require_object(root.at("channel"), "channel");
    reject_unknown(j, "channel",
                   {"noise_convention", "noise_value", "eta", "wavelength_m", "pulse_s"});
    cfg.noise_convention = get_string(j, "channel", "noise_convention");
    cfg.noise_value = get_number(j, "channel", "noise_value");
    cfg.chan.noise_intensity_W_m2 =
        noise_intensity_from(cfg.noise_convention, cfg.noise_value, cfg.geom);
    cfg.chan.eta = get_number(j, "channel", "eta");
    cfg.chan.wavelength_m = get_number(j, "channel", "wavelength_m");
    cfg.chan.pulse_s = get_number(j, "channel", "pulse_s");
    try {
      validate(cfg.chan);
    } catch (const std::exception& e) {
      throw ConfigError("channel", e.what());
    }
  }

  if (root.contains("scan")) {
    const json& j = require_object(root.at("scan"), "scan");
    reject_unknown(j, "scan",
                   {"ru_m", "receiver_processing_s", "range_m", "overlap", "observation_s",
                    "region_scale_a"});
    ScanConfig s;
    s.ru_m = get_number(j, "scan", "ru_m");
    s.receiver_processing_s = get_number_or(j, "scan", "receiver_processing_s", 1e-3);
    s.range_m = get_number_or(j, "scan", "range_m", 0.0);
    s.overlap = get_number_or(j, "scan", "overlap", 0.5);
    s.observation_s = get_number_or(j, "scan", "observation_s", 0.0);
    s.region_scale_a = get_number_or(j, "scan", "region_scale_a", 1.0);
    if (s.ru_m <= 0.0) throw ConfigError("scan.ru_m", "expected > 0");
    if (s.overlap <= 0.0 || s.overlap >= 1.0) {
      throw ConfigError("scan.overlap", "expected in (0, 1)");
    }
    if (s.region_scale_a < 1.0) {
      throw ConfigError("scan.region_scale_a", "expected >= 1");
    }
    cfg.scan = s;
  }

  const double range_m = cfg.scan ? cfg.scan->range_m : 0.0;
  if (!root.contains("beam")) throw ConfigError("beam", "missing required block");
  cfg.beam = parse_beam(root.at("beam"), "beam", nullptr, cfg.chan.wavelength_m, range_m);
  cfg.assumed_beam = root.contains("assumed_beam")
                         ? parse_beam(root.at("assumed_beam"), "assumed_beam", &cfg.beam,
                                      cfg.chan.wavelength_m, range_m)
                         : cfg.beam;

  if (root.contains("uncertainty")) {
    const json& j = require_object(root.at("uncertainty"), "uncertainty");
    reject_unknown(j, "uncertainty", {"sigma0_m"});
    const double s0 = get_number(j, "uncertainty", "sigma0_m");
    if (s0 <= 0.0) throw ConfigError("uncertainty.sigma0_m", "expected > 0");
    cfg.sigma0_m = s0;
  }

  if (!root.contains("detection")) throw ConfigError("detection", "missing required block");
  {
    const json& j = require_object(root.at("detection"), "detection");
    reject_unknown(j, "detection", {"gamma0", "gamma", "target_pf", "target_pfu"});
    cfg.detection.gamma0 = get_optional_number(j, "detection", "gamma0");
    cfg.detection.gamma = get_optional_number(j, "detection", "gamma");
    cfg.detection.target_pf = get_optional_number(j, "detection", "target_pf");
    cfg.detection.target_pfu = get_optional_number(j, "detection", "target_pfu");
    const int given = int(cfg.detection.gamma0.has_value()) + int(cfg.detection.gamma.has_value()) +
                      int(cfg.detection.target_pf.has_value()) +
                      int(cfg.detection.target_pfu.has_value());
    if (given != 1) {
      throw ConfigError("detection",
                        "give exactly one of gamma0, gamma, target_pf, target_pfu");
    }
    if (cfg.detection.target_pf && (*cfg.detection.target_pf <= 0.0 || *cfg.detection.target_pf >= 1.0)) {
      throw ConfigError("detection.target_pf", "expected in (0, 1)");
    }
    if (cfg.detection.target_pfu &&
        (*cfg.detection.target_pfu <= 0.0 || *cfg.detection.target_pfu >= 1.0)) {
      throw ConfigError("detection.target_pfu", "expected in (0, 1)");
    }
  }

  if (root.contains("sweep")) {
    const json& j = require_object(root.at("sweep"), "sweep");
    reject_unknown(j, "sweep", {"variable", "grid"});
    SweepConfig s;
    s.variable = get_string(j, "sweep", "variable");
    static const std::set<std::string> kVars = {
        "gamma0",         "noise_value",   "assumed_power_W", "assumed_rho_m",
        "assumed_x0_m",   "rho_m",         "power_W",         "time_s"};
    if (kVars.count(s.variable) == 0) {
      throw ConfigError("sweep.variable", "unknown sweep variable \"" + s.variable + "\"");
    }
    if (!j.contains("grid")) throw ConfigError("sweep.grid", "missing required field");
    const json& g = j.at("grid");
    if (!g.is_array() || g.empty()) throw ConfigError("sweep.grid", "expected a non-empty array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_number()) {
        throw ConfigError("sweep.grid[" + std::to_string(i) + "]", "expected a number");
      }
      s.grid.push_back(g[i].get<double>());
    }
    cfg.sweep = s;
  }

  if (root.contains("whiten")) {
    const json& j = require_object(root.at("whiten"), "whiten");
    reject_unknown(j, "whiten", {"cov_xx_m2", "cov_xy_m2", "cov_yy_m2", "sigma_scale"});
    WhitenConfig w;
    w.cov_xx_m2 = get_number(j, "whiten", "cov_xx_m2");
    w.cov_xy_m2 = get_number(j, "whiten", "cov_xy_m2");
    w.cov_yy_m2 = get_number(j, "whiten", "cov_yy_m2");
    w.sigma_scale = get_number_or(j, "whiten", "sigma_scale", 1.0);
    if (w.sigma_scale <= 0.0) throw ConfigError("whiten.sigma_scale", "expected > 0");
    cfg.whiten = w;
  }

  if (root.contains("mc")) {
    const json& j = require_object(root.at("mc"), "mc");
    reject_unknown(j, "mc", {"seed", "trials", "threads"});
    cfg.mc.seed = get_uint_or(j, "mc", "seed", 1);
    cfg.mc.trials = get_uint_or(j, "mc", "trials", 10000);
    const std::uint64_t threads = get_uint_or(j, "mc", "threads", 1);
    if (cfg.mc.trials == 0) throw ConfigError("mc.trials", "expected > 0");
    if (threads == 0 || threads > 1024) throw ConfigError("mc.threads", "expected in [1, 1024]");
    cfg.mc.threads = static_cast<int>(threads);
  }

  if (root.contains("rho_opt")) {
    const json& j = require_object(root.at("rho_opt"), "rho_opt");
    reject_unknown(j, "rho_opt", {"rho_min_m", "rho_max_m"});
    cfg.rho_min_m = get_optional_number(j, "rho_opt", "rho_min_m");
    cfg.rho_max_m = get_optional_number(j, "rho_opt", "rho_max_m");
    if (cfg.rho_min_m && *cfg.rho_min_m <= 0.0) {
      throw ConfigError("rho_opt.rho_min_m", "expected > 0");
    }
  }

  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("$", "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string resolved_json_text(const RunConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario;
  j["geometry"] = {{"cells_per_side", cfg.geom.cells_per_side}, {"side_m", cfg.geom.side_m}};
  j["beam"] = {{"power_W", cfg.beam.power_W},
               {"rho_m", cfg.beam.rho_m},
               {"x0_m", cfg.beam.x0_m},
               {"y0_m", cfg.beam.y0_m}};
  j["assumed_beam"] = {{"power_W", cfg.assumed_beam.power_W},
                       {"rho_m", cfg.assumed_beam.rho_m},
                       {"x0_m", cfg.assumed_beam.x0_m},
                       {"y0_m", cfg.assumed_beam.y0_m}};
  // Only schema fields here: this text must itself parse as a config
  // (round-trip contract). Derived quantities go in the run sidecar.
  j["channel"] = {{"noise_convention", cfg.noise_convention},
                  {"noise_value", cfg.noise_value},
                  {"eta", cfg.chan.eta},
                  {"wavelength_m", cfg.chan.wavelength_m},
                  {"pulse_s", cfg.chan.pulse_s}};
  if (cfg.scan) {
    j["scan"] = {{"ru_m", cfg.scan->ru_m},
                 {"receiver_processing_s", cfg.scan->receiver_processing_s},
                 {"range_m", cfg.scan->range_m},
                 {"overlap", cfg.scan->overlap},
                 {"observation_s", cfg.scan->observation_s},
                 {"region_scale_a", cfg.scan->region_scale_a}};
  }
  if (cfg.sigma0_m) j["uncertainty"] = {{"sigma0_m", *cfg.sigma0_m}};
  {
    json d = json::object();
    if (cfg.detection.gamma0) d["gamma0"] = *cfg.detection.gamma0;
    if (cfg.detection.gamma) d["gamma"] = *cfg.detection.gamma;
    if (cfg.detection.target_pf) d["target_pf"] = *cfg.detection.target_pf;
    if (cfg.detection.target_pfu) d["target_pfu"] = *cfg.detection.target_pfu;
    j["detection"] = d;
  }
  if (cfg.sweep) {
    j["sweep"] = {{"variable", cfg.sweep->variable}, {"grid", cfg.sweep->grid}};
  }
  if (cfg.whiten) {
    j["whiten"] = {{"cov_xx_m2", cfg.whiten->cov_xx_m2},
                   {"cov_xy_m2", cfg.whiten->cov_xy_m2},
                   {"cov_yy_m2", cfg.whiten->cov_yy_m2},
                   {"sigma_scale", cfg.whiten->sigma_scale}};
  }
  j["mc"] = {{"seed", cfg.mc.seed}, {"trials", cfg.mc.trials}, {"threads", cfg.mc.threads}};
  if (cfg.rho_min_m || cfg.rho_max_m) {
    json r = json::object();
    if (cfg.rho_min_m) r["rho_min_m"] = *cfg.rho_min_m;
    if (cfg.rho_max_m) r["rho_max_m"] = *cfg.rho_max_m;
    j["rho_opt"] = r;
  }
  // nlohmann::json objects iterate in key order, so dump() is canonical.
  return j.dump(2);
}

std::string config_hash_hex(const RunConfig& cfg) {
  const std::string text = resolved_json_text(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace fsoacq
