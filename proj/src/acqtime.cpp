#include "fsoacq/acqtime.hpp"

#include <cmath>
#include <stdexcept>

#include "fsoacq/numeric.hpp"

namespace fsoacq {

AcqTimeModel make_acq_model(double p, double ts_s, double td_s, double rho_m,
                            double sigma0_m) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::invalid_argument("acq model: p must be in [0, 1)");
  if (!(ts_s > 0.0)) throw std::invalid_argument("acq model: ts_s must be > 0");
  if (!(td_s > 0.0)) throw std::invalid_argument("acq model: td_s must be > 0");
  if (!(rho_m > 0.0)) throw std::invalid_argument("acq model: rho_m must be > 0");
  if (!(sigma0_m > 0.0))
    throw std::invalid_argument("acq model: sigma0_m must be > 0");
  AcqTimeModel model;
  model.p = p;
  model.ts_s = ts_s;
  model.td_s = td_s;
  model.beta = rho_m * rho_m / (2.0 * td_s * sigma0_m * sigma0_m);
  return model;
}

double expected_failed_scans(double p) {
  if (!(p >= 0.0 && p < 1.0))
    throw std::invalid_argument("expected_failed_scans: p must be in [0, 1)");
  return p / (1.0 - p);
}

double expected_final_scan_steps(double sigma0_m, double rho_m) {
  if (!(sigma0_m > 0.0))
    throw std::invalid_argument("expected_final_scan_steps: sigma0 must be > 0");
  if (!(rho_m > 0.0))
    throw std::invalid_argument("expected_final_scan_steps: rho must be > 0");
  return 2.0 * sigma0_m * sigma0_m / (rho_m * rho_m);
}

MeanTimeBound mean_acq_time_upper_bound(double array_area, double array_side,
                                        const MomentSummary& mom,
                                        double gamma0, double ru_m,
                                        double td_s, double sigma0_m,
                                        double rho_m) {
  if (!(array_area > 0.0) || !(array_side > 0.0))
    throw std::invalid_argument("mean bound: array dimensions must be > 0");
  if (!(ru_m > 0.0) || !(td_s > 0.0) || !(sigma0_m > 0.0) || !(rho_m > 0.0))
    throw std::invalid_argument("mean bound: scan parameters must be > 0");
  MeanTimeBound out;
  out.exponent = array_area / (4.0 * rho_m * rho_m) - array_side / rho_m - 2.0;
  if (out.exponent < 1.0)
    throw std::domain_error(
        "mean bound: exponent |A|/(4 rho^2) - L/rho - 2 must be >= 1");
  if (!(mom.k_s > 0.0) || !(mom.mu_s > 0.0))
    throw std::domain_error("mean bound: signal moments must be > 0");
  out.g = gamma0 <= 0.0 ? 0.0
                        : reg_gamma_q(mom.k_s * gamma0 + 1.0, mom.k_s * mom.mu_s);
  const double steps = ru_m * ru_m / (rho_m * rho_m);
  const double ge = std::pow(out.g, out.exponent);
  if (ge >= 1.0)
    throw std::domain_error("mean bound: per-scan miss bound reaches 1");
  out.value_s = steps * td_s * ge / (1.0 - ge) +
                td_s * expected_final_scan_steps(sigma0_m, rho_m);
  return out;
}

double pdf_acq_time(const AcqTimeModel& model, double t_s) {
  if (t_s <= 0.0) return 0.0;
  const double log_p = std::log(model.p);  // -inf when p = 0
  const auto k_max = static_cast<std::int64_t>(std::floor(t_s / model.ts_s));
  double sum = 0.0;
  for (std::int64_t k = 0; k <= k_max; ++k) {
    const double log_term = (k == 0 ? 0.0 : static_cast<double>(k) * log_p) -
                            model.beta * (t_s - static_cast<double>(k) * model.ts_s);
    sum += std::exp(log_term);
    if (model.p == 0.0) break;
  }
  return model.beta * (1.0 - model.p) * sum;
}

double ccdf_acq_time(const AcqTimeModel& model, double gamma_s) {
  if (gamma_s <= 0.0) return 1.0;
  const double beta = model.beta;
  const double p = model.p;
  const double n = std::ceil(gamma_s / model.ts_s);
  if (p == 0.0) return std::exp(-beta * gamma_s);

  const double log_p = std::log(p);
  const double log_q = log_p + beta * model.ts_s;  // ratio p e^{beta Ts}
  const double tail = std::exp(n * log_p);         // p^n
  double decay_sum;
  if (std::abs(std::expm1(log_q)) < 1e-9) {
    // Degenerate ratio: n equal-magnitude terms, summed directly.
    double s = 0.0;
    for (double k = 0.0; k < n; k += 1.0)
      s += std::exp(k * log_p - beta * (gamma_s - k * model.ts_s));
    decay_sum = s;
  } else {
    // e^{-beta gamma} (q^n - 1) / (q - 1) with q^n e^{-beta gamma} evaluated
    // jointly: n log p - beta (gamma - n Ts) never overflows because
    // gamma > (n-1) Ts.
    const double a = std::exp(n * log_p - beta * (gamma_s - n * model.ts_s));
    const double b = std::exp(-beta * gamma_s);
    decay_sum = (a - b) / std::expm1(log_q);
  }
  double ccdf = (1.0 - p) * decay_sum + tail;
  if (ccdf < 0.0) ccdf = 0.0;
  if (ccdf > 1.0) ccdf = 1.0;
  return ccdf;
}

}  // namespace fsoacq
