#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsoacq/beam.hpp"
#include "fsoacq/geometry.hpp"

namespace fsoacq {

/// Configuration rejection: message carries the JSON path of the offending
/// field (unknown key, wrong type, bad value, missing block).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// A run is infeasible physics rather than a bad config (exponent < 1,
/// no feasible rho, miss bound at 1, ...).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScanConfig {
  double ru_m = 50.0;
  double receiver_processing_s = 1e-3;
  double range_m = 0.0;
  double overlap = 0.5;
  double observation_s = 0.0;
  double region_scale_a = 1.0;  // scan-time stretch for non-circular regions
};

struct DetectionConfig {
  std::optional<double> gamma0;
  std::optional<double> gamma;       // pre-offset threshold
  std::optional<double> target_pf;   // per-pulse calibration target
  std::optional<double> target_pfu;  // scan-level calibration target
};

struct SweepConfig {
  std::string variable;
  std::vector<double> grid;
};

struct WhitenConfig {
  double cov_xx_m2 = 1.0;
  double cov_xy_m2 = 0.0;
  double cov_yy_m2 = 1.0;
  double sigma_scale = 1.0;
};

struct McConfig {
  std::uint64_t seed = 1;
  std::uint64_t trials = 10000;
  int threads = 1;
};

/// Parsed and resolved run configuration. The channel's noise intensity is
/// already resolved from the declared convention (total power over the
/// array vs intensity per m^2).
struct RunConfig {
  std::string scenario;
  ArrayGeometry geom;
  BeamParams beam;
  BeamParams assumed_beam;  // defaults to beam
  ChannelParams chan;
  std::string noise_convention;  // "total_power_W" | "intensity_W_m2"
  double noise_value = 0.0;      // as given in the file
  std::optional<ScanConfig> scan;
  std::optional<double> sigma0_m;
  DetectionConfig detection;
  std::optional<SweepConfig> sweep;
  std::optional<WhitenConfig> whiten;
  McConfig mc;
  std::optional<double> rho_min_m;
  std::optional<double> rho_max_m;
};

/// Parse from JSON text; throws ConfigError on any schema violation
/// (unknown fields are rejected).
RunConfig parse_run_config(const std::string& json_text);

/// Parse a config file.
RunConfig load_run_config(const std::string& path);

/// Canonical resolved-config JSON (sorted keys, all defaults applied).
std::string resolved_json_text(const RunConfig& cfg);

/// FNV-1a 64 over the canonical resolved JSON, as a hex string.
std::string config_hash_hex(const RunConfig& cfg);

/// Convert a noise value in the given convention to intensity (W/m^2).
double noise_intensity_from(const std::string& convention, double value,
                            const ArrayGeometry& geom);

}  // namespace fsoacq
