#include "fsoacq/optimize.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fsoacq/acqtime.hpp"
#include "fsoacq/detector.hpp"
#include "fsoacq/scan.hpp"
#include "fsoacq/stats.hpp"

namespace fsoacq {

double rho_exponent_limit(const ArrayGeometry& geom) {
  // |A|/(4 rho^2) - L/rho - 2 >= 1  <=>  3 rho^2 + L rho - |A|/4 <= 0.
  const double area = array_area(geom);
  const double l = geom.side_m;
  return (-l + std::sqrt(l * l + 3.0 * area)) / 6.0;
}

RhoObjective rho_objective(const RhoProblem& problem, double rho_m) {
  if (!(rho_m > 0.0))
    throw std::invalid_argument("rho_objective: rho must be > 0");
  if (!(problem.target_pfu > 0.0 && problem.target_pfu < 1.0))
    throw std::invalid_argument("rho_objective: target_pfu must be in (0, 1)");
  RhoObjective out;
  out.rho_m = rho_m;
  out.value_s = std::numeric_limits<double>::infinity();

  const double area = array_area(problem.geom);
  const double side = problem.geom.side_m;
  out.exponent = area / (4.0 * rho_m * rho_m) - side / rho_m - 2.0;
  if (out.exponent < 1.0) return out;

  const PackingCounts pack = packing_counts(area, side, rho_m);
  if (!pack.floor_valid) return out;
  const std::int64_t n_steps = steps_per_scan(problem.ru_m, rho_m);
  const std::int64_t n_eff = n_steps - pack.full_overlap_floor;
  if (n_eff <= 0) return out;

  BeamParams beam = problem.beam;
  beam.rho_m = rho_m;
  const std::vector<double> weights =
      detector_weights(problem.geom, beam, problem.chan);
  MomentSummary mom;
  try {
    mom = compute_moments(problem.geom, beam, problem.chan, weights);
  } catch (const std::domain_error&) {
    return out;  // degenerate weights at this rho
  }

  // Per-pulse false-alarm budget so that the scan-level upper bound
  // 1 - (1 - pf)^(Ns - floor) meets target_pfu.
  const double pf_point =
      -std::expm1(std::log1p(-problem.target_pfu) /
                  static_cast<double>(n_eff));
  out.gamma0 = calibrate_threshold(mom, pf_point);
  const double pf = pf_scaled_poisson(mom, out.gamma0);
  out.pfu_achieved =
      -std::expm1(static_cast<double>(n_eff) * std::log1p(-pf));

  try {
    const MeanTimeBound bound = mean_acq_time_upper_bound(
        area, side, mom, out.gamma0, problem.ru_m, problem.td_s,
        problem.sigma0_m, rho_m);
    out.g = bound.g;
    out.value_s = bound.value_s;
    out.feasible = true;
  } catch (const std::domain_error&) {
    return out;
  }
  return out;
}

ScalarMinResult minimize_scalar(const std::function<double(double)>& f,
                                double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tol > 0");
  ScalarMinResult res;
  res.value = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 64;
  int best_idx = -1;
  std::array<double, kGrid> grid;
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1);
    const double v = f(grid[i]);
    ++res.n_evaluations;
    if (v < res.value) {
      res.value = v;
      res.x = grid[i];
      best_idx = i;
    }
  }
  if (best_idx < 0) return res;  // nothing finite

  // Golden-section refinement inside the bracketing neighbors.
  double a = grid[std::max(best_idx - 1, 0)];
  double b = grid[std::min(best_idx + 1, kGrid - 1)];
  const double gr = (std::sqrt(5.0) + 1.0) / 2.0;
  double c = b - (b - a) / gr;
  double d = a + (b - a) / gr;
  double fc = f(c);
  double fd = f(d);
  res.n_evaluations += 2;
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) / gr;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) / gr;
      fd = f(d);
    }
    ++res.n_evaluations;
  }
  if (fc < res.value) {
    res.value = fc;
    res.x = c;
  }
  if (fd < res.value) {
    res.value = fd;
    res.x = d;
  }
  return res;
}

RhoOptResult minimize_rho(const RhoProblem& problem) {
  const double limit = rho_exponent_limit(problem.geom);
  double hi = problem.rho_max_m > 0.0 ? problem.rho_max_m : limit;
  hi = std::min(hi, limit);
  const double lo = problem.rho_min_m > 0.0 ? problem.rho_min_m : hi / 64.0;
  if (!(lo > 0.0) || !(lo < hi))
    throw std::invalid_argument("minimize_rho: empty rho interval");

  const auto value_at = [&](double rho) {
    const RhoObjective obj = rho_objective(problem, rho);
    return obj.feasible ? obj.value_s : std::numeric_limits<double>::infinity();
  };
  const ScalarMinResult s = minimize_scalar(value_at, lo, hi, 1e-4);

  RhoOptResult res;
  res.n_evaluations = s.n_evaluations;
  res.best.value_s = std::numeric_limits<double>::infinity();
  if (!std::isfinite(s.value)) return res;  // nothing feasible
  res.best = rho_objective(problem, s.x);
  ++res.n_evaluations;
  return res;
}

std::vector<NoiseSweepRow> sweep_noise(const RhoProblem& problem,
                                       const std::vector<double>& noise_grid) {
  if (noise_grid.empty())
    throw std::invalid_argument("sweep_noise: empty noise grid");
  std::vector<NoiseSweepRow> rows;
  rows.reserve(noise_grid.size());
  for (const double noise : noise_grid) {
    RhoProblem p = problem;
    p.chan.noise_intensity_W_m2 = noise;
    NoiseSweepRow row;
    row.noise_value = noise;
    row.result = minimize_rho(p);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fsoacq
