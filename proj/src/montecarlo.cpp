#include "fsoacq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fsoacq/numeric.hpp"
#include "fsoacq/rng.hpp"

namespace fsoacq {
namespace {

// Stream operation ids; sweep points offset these by their grid index.
constexpr std::uint32_t kOpPm = 0x01000000u;
constexpr std::uint32_t kOpPf = 0x02000000u;
constexpr std::uint32_t kOpScanPm = 0x03000000u;
constexpr std::uint32_t kOpAcqTime = 0x04000000u;
constexpr std::uint32_t kOpSweepPm = 0x05000000u;
constexpr std::uint32_t kOpSweepPf = 0x06000000u;

void check_trials(const TrialConfig& cfg) {
  if (cfg.n_trials == 0)
    throw std::invalid_argument("montecarlo: n_trials must be > 0");
  if (cfg.n_trials > 0xFFFFFFFFull)
    throw std::invalid_argument("montecarlo: n_trials exceeds stream space");
}

int clamp_threads(int n) { return std::clamp(n, 1, 256); }

// Runs fn(trial) for every trial index and returns the event count. Chunked
// across threads; the count is an exact integer so the reduction order does
// not matter.
template <typename Fn>
std::uint64_t count_events(std::uint64_t n_trials, int n_threads, Fn&& fn) {
  const int workers = clamp_threads(n_threads);
  if (workers == 1) {
    std::uint64_t events = 0;
    for (std::uint64_t i = 0; i < n_trials; ++i)
      if (fn(static_cast<std::uint32_t>(i))) ++events;
    return events;
  }
  std::vector<std::uint64_t> partial(workers, 0);
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (n_trials + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::uint64_t lo = static_cast<std::uint64_t>(w) * chunk;
      const std::uint64_t hi = std::min(n_trials, lo + chunk);
      std::uint64_t local = 0;
      for (std::uint64_t i = lo; i < hi; ++i)
        if (fn(static_cast<std::uint32_t>(i))) ++local;
      partial[w] = local;
    });
  }
  for (auto& t : pool) t.join();
  std::uint64_t events = 0;
  for (const auto c : partial) events += c;
  return events;
}

EstimateWithCI summarize(std::uint64_t events, std::uint64_t n) {
  EstimateWithCI out;
  out.n_trials = n;
  out.events = events;
  out.estimate = static_cast<double>(events) / static_cast<double>(n);
  out.half_width_95 =
      1.96 * std::sqrt(out.estimate * (1.0 - out.estimate) /
                       static_cast<double>(n));
  const double e = static_cast<double>(events);
  out.upper_bound_95 = (e + 1.96 * std::sqrt(e) + 3.0) / static_cast<double>(n);
  out.censored = events < 10;
  return out;
}

struct BatchSetup {
  std::vector<double> weights;
  std::vector<double> means_h1;
  std::vector<double> means_h0;
  double gamma0 = 0.0;
};

BatchSetup make_setup(const TrialConfig& cfg) {
  validate(cfg.true_beam);
  validate(cfg.assumed_beam);
  validate(cfg.chan);
  check_trials(cfg);
  BatchSetup s;
  s.weights = detector_weights(cfg.geom, cfg.assumed_beam, cfg.chan);
  const double k = photon_count_factor(cfg.chan);
  const double noise_counts =
      k * cfg.chan.noise_intensity_W_m2 * cell_area(cfg.geom);
  const std::vector<double> flux = cell_signal_fluxes(cfg.geom, cfg.true_beam);
  s.means_h1.resize(flux.size());
  s.means_h0.assign(flux.size(), noise_counts);
  for (std::size_t m = 0; m < flux.size(); ++m)
    s.means_h1[m] = k * flux[m] + noise_counts;
  s.gamma0 = cfg.gamma0;
  return s;
}

// One pulse: draw counts at the given means, return the statistic.
double draw_statistic(RngStream& rng, const std::vector<double>& weights,
                      const std::vector<double>& means) {
  double stat = 0.0;
  double comp = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) {
    const double v =
        weights[m] * static_cast<double>(rng.poisson(means[m]));
    const double t = stat + v;
    if (std::abs(stat) >= std::abs(v)) {
      comp += (stat - t) + v;
    } else {
      comp += (v - t) + stat;
    }
    stat = t;
  }
  return stat + comp;
}

std::uint64_t run_pm_batch(const TrialConfig& cfg, const BatchSetup& s,
                           std::uint32_t op) {
  return count_events(cfg.n_trials, cfg.n_threads, [&](std::uint32_t i) {
    RngStream rng(cfg.seed, op, i);
    return draw_statistic(rng, s.weights, s.means_h1) < s.gamma0;
  });
}

std::uint64_t run_pf_batch(const TrialConfig& cfg, const BatchSetup& s,
                           std::uint32_t op) {
  return count_events(cfg.n_trials, cfg.n_threads, [&](std::uint32_t i) {
    RngStream rng(cfg.seed, op, i);
    return draw_statistic(rng, s.weights, s.means_h0) > s.gamma0;
  });
}

// Matched per-step detection at the true relative beam center (bx, by):
// weights, means, and counts all come from that geometry; gamma0 is fixed.
bool step_detects(RngStream& rng, const ArrayGeometry& geom,
                  const BeamParams& true_beam, double k_factor,
                  double noise_power_cell, double noise_counts, double bx,
                  double by, double gamma0) {
  BeamParams at_step = true_beam;
  at_step.x0_m = bx;
  at_step.y0_m = by;
  const std::vector<double> flux = cell_signal_fluxes(geom, at_step);
  double stat = 0.0;
  double comp = 0.0;
  for (const double f : flux) {
    const double w = std::log1p(f / noise_power_cell);
    const double mean = k_factor * f + noise_counts;
    const double v = w * static_cast<double>(rng.poisson(mean));
    const double t = stat + v;
    if (std::abs(stat) >= std::abs(v)) {
      comp += (stat - t) + v;
    } else {
      comp += (v - t) + stat;
    }
    stat = t;
  }
  return stat + comp >= gamma0;
}

}  // namespace

bool footprint_overlaps(const ArrayGeometry& geom, double x_m, double y_m,
                        double rho_m) {
  const double half = 0.5 * geom.side_m;
  const double dx = std::max(std::abs(x_m) - half, 0.0);
  const double dy = std::max(std::abs(y_m) - half, 0.0);
  return dx * dx + dy * dy <= rho_m * rho_m;
}

EstimateWithCI estimate_pm(const TrialConfig& cfg) {
  const BatchSetup s = make_setup(cfg);
  return summarize(run_pm_batch(cfg, s, kOpPm), cfg.n_trials);
}

EstimateWithCI estimate_pf(const TrialConfig& cfg) {
  const BatchSetup s = make_setup(cfg);
  return summarize(run_pf_batch(cfg, s, kOpPf), cfg.n_trials);
}

EstimateWithCI estimate_scan_pm(const TrialConfig& cfg, const ScanPlan& plan,
                                double sigma0_m) {
  validate(cfg.true_beam);
  validate(cfg.chan);
  check_trials(cfg);
  if (!(sigma0_m > 0.0))
    throw std::invalid_argument("estimate_scan_pm: sigma0 must be > 0");
  if (plan.points.empty())
    throw std::invalid_argument("estimate_scan_pm: empty scan plan");
  const double k = photon_count_factor(cfg.chan);
  const double noise_power_cell =
      cfg.chan.noise_intensity_W_m2 * cell_area(cfg.geom);
  const double noise_counts = k * noise_power_cell;
  const double rho = cfg.true_beam.rho_m;

  const std::uint64_t misses =
      count_events(cfg.n_trials, cfg.n_threads, [&](std::uint32_t i) {
        RngStream rng(cfg.seed, kOpScanPm, i);
        const double ox = sigma0_m * rng.normal();
        const double oy = sigma0_m * rng.normal();
        for (const SpiralPoint& pt : plan.points) {
          const double bx = pt.x_m - ox;
          const double by = pt.y_m - oy;
          if (!footprint_overlaps(cfg.geom, bx, by, rho)) continue;
          if (step_detects(rng, cfg.geom, cfg.true_beam, k, noise_power_cell,
                           noise_counts, bx, by, cfg.gamma0))
            return false;  // detected somewhere: not a miss
        }
        return true;
      });
  return summarize(misses, cfg.n_trials);
}

AcqTimeSamples sample_acq_time(const TrialConfig& cfg, const ScanPlan& plan,
                               double sigma0_m, double ts_s, double td_s,
                               std::uint64_t max_scans) {
  validate(cfg.true_beam);
  validate(cfg.chan);
  check_trials(cfg);
  if (!(sigma0_m > 0.0))
    throw std::invalid_argument("sample_acq_time: sigma0 must be > 0");
  if (!(ts_s > 0.0) || !(td_s > 0.0))
    throw std::invalid_argument("sample_acq_time: ts and td must be > 0");
  if (plan.points.empty())
    throw std::invalid_argument("sample_acq_time: empty scan plan");
  if (max_scans == 0)
    throw std::invalid_argument("sample_acq_time: max_scans must be > 0");
  const double k = photon_count_factor(cfg.chan);
  const double noise_power_cell =
      cfg.chan.noise_intensity_W_m2 * cell_area(cfg.geom);
  const double noise_counts = k * noise_power_cell;
  const double rho = cfg.true_beam.rho_m;

  AcqTimeSamples out;
  out.times_s.assign(cfg.n_trials, 0.0);
  std::uint64_t censored = 0;
  for (std::uint64_t i = 0; i < cfg.n_trials; ++i) {
    RngStream rng(cfg.seed, kOpAcqTime, static_cast<std::uint32_t>(i));
    const double ox = sigma0_m * rng.normal();
    const double oy = sigma0_m * rng.normal();
    bool done = false;
    for (std::uint64_t scan = 0; scan < max_scans && !done; ++scan) {
      for (std::size_t j = 0; j < plan.points.size(); ++j) {
        const double bx = plan.points[j].x_m - ox;
        const double by = plan.points[j].y_m - oy;
        if (!footprint_overlaps(cfg.geom, bx, by, rho)) continue;
        if (step_detects(rng, cfg.geom, cfg.true_beam, k, noise_power_cell,
                         noise_counts, bx, by, cfg.gamma0)) {
          out.times_s[i] = static_cast<double>(scan) * ts_s +
                           static_cast<double>(j + 1) * td_s;
          done = true;
          break;
        }
      }
    }
    if (!done) {
      out.times_s[i] = static_cast<double>(max_scans) * ts_s;
      ++censored;
    }
  }
  out.censored = censored;
  return out;
}

std::vector<SensitivityRow> sensitivity_sweep(const TrialConfig& cfg,
                                              SweepParam param,
                                              const std::vector<double>& grid) {
  if (grid.empty())
    throw std::invalid_argument("sensitivity_sweep: empty grid");
  if (grid.size() > 0xFFFFFF)
    throw std::invalid_argument("sensitivity_sweep: grid too large");
  std::vector<SensitivityRow> rows;
  rows.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TrialConfig point = cfg;
    switch (param) {
      case SweepParam::AssumedPower:
        point.assumed_beam.power_W = grid[g];
        break;
      case SweepParam::AssumedRho:
        point.assumed_beam.rho_m = grid[g];
        break;
      case SweepParam::AssumedX0:
        point.assumed_beam.x0_m = grid[g];
        break;
    }
    const BatchSetup s = make_setup(point);
    SensitivityRow row;
    row.value = grid[g];
    const auto idx = static_cast<std::uint32_t>(g);
    row.pm = summarize(run_pm_batch(point, s, kOpSweepPm + idx),
                       point.n_trials);
    row.pf = summarize(run_pf_batch(point, s, kOpSweepPf + idx),
                       point.n_trials);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fsoacq
