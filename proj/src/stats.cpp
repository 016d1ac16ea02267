#include "fsoacq/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fsoacq/numeric.hpp"

namespace fsoacq {
namespace {

// pf when the integer count threshold is j, i.e. for any gamma0 with
// floor(k_n gamma0 + 1) = j: P(Poisson(k_n mu_n) >= j).
double pf_at_step(const MomentSummary& mom, std::int64_t j) {
  return 1.0 - reg_gamma_q(static_cast<double>(j), mom.k_n * mom.mu_n);
}

}  // namespace

double pm_gaussian(const MomentSummary& mom, double gamma0) {
  if (!(mom.var_s > 0.0))
    throw std::domain_error("pm_gaussian: var_s must be > 0");
  return normal_cdf((gamma0 - mom.mu_s) / std::sqrt(mom.var_s));
}

double pm_scaled_poisson(const MomentSummary& mom, double gamma0) {
  if (!(mom.var_s > 0.0) || !(mom.mu_s > 0.0))
    throw std::domain_error("pm_scaled_poisson: signal moments must be > 0");
  if (gamma0 < 0.0) gamma0 = 0.0;  // the statistic is non-negative
  const double a = std::floor(mom.k_s * gamma0 + 1.0);
  return reg_gamma_q(a, mom.k_s * mom.mu_s);
}

double pf_scaled_poisson(const MomentSummary& mom, double gamma0) {
  if (!(mom.k_n > 0.0) || !(mom.mu_n > 0.0))
    throw std::domain_error("pf_scaled_poisson: noise moments must be > 0");
  if (gamma0 < 0.0) gamma0 = 0.0;
  const double a = std::floor(mom.k_n * gamma0 + 1.0);
  return 1.0 - reg_gamma_q(a, mom.k_n * mom.mu_n);
}

double calibrate_threshold(const MomentSummary& mom, double target_pf) {
  if (!(target_pf > 0.0 && target_pf < 1.0))
    throw std::invalid_argument("calibrate_threshold: target must be in (0, 1)");
  if (!(mom.k_n > 0.0) || !(mom.mu_n > 0.0))
    throw std::domain_error("calibrate_threshold: noise moments must be > 0");
  if (pf_at_step(mom, 1) <= target_pf) return 0.0;

  // Bracket the smallest integer count threshold meeting the target, then
  // bisect. pf_at_step is strictly decreasing in j.
  std::int64_t lo = 1;  // pf(lo) > target
  std::int64_t hi = 2;
  while (pf_at_step(mom, hi) > target_pf) {
    lo = hi;
    if (hi > (std::int64_t{1} << 56))
      throw std::runtime_error("calibrate_threshold: bracket overflow");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (pf_at_step(mom, mid) <= target_pf) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // Smallest gamma0 with floor(k_n gamma0 + 1) = hi is (hi - 1) / k_n; nudge
  // up until the floor lands on the right side of the step despite rounding.
  double gamma0 = static_cast<double>(hi - 1) / mom.k_n;
  while (std::floor(mom.k_n * gamma0 + 1.0) < static_cast<double>(hi))
    gamma0 = std::nextafter(gamma0, std::numeric_limits<double>::infinity());
  return gamma0;
}

ScanProbBounds pm_scan_bounds(double pm, const PackingCounts& pack) {
  if (!(pm >= 0.0 && pm <= 1.0))
    throw std::invalid_argument("pm_scan_bounds: pm must be in [0, 1]");
  if (!pack.floor_valid)
    throw std::domain_error("pm_scan_bounds: beam too large for packing bounds");
  ScanProbBounds out;
  out.lower = std::pow(pm, static_cast<double>(pack.n1));
  out.upper = std::pow(pm, static_cast<double>(pack.full_overlap_floor));
  return out;
}

ScanProbBounds pf_scan_bounds(double pf, std::int64_t n_steps,
                              const PackingCounts& pack) {
  if (!(pf >= 0.0 && pf <= 1.0))
    throw std::invalid_argument("pf_scan_bounds: pf must be in [0, 1]");
  if (n_steps <= pack.n1)
    throw std::invalid_argument("pf_scan_bounds: n_steps must exceed n1");
  const double log_keep = std::log1p(-pf);
  ScanProbBounds out;
  out.lower = -std::expm1(static_cast<double>(n_steps - pack.n1) * log_keep);
  out.upper = -std::expm1(
      static_cast<double>(n_steps - pack.full_overlap_floor) * log_keep);
  return out;
}

}  // namespace fsoacq
