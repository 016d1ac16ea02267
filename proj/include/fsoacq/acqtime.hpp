#pragma once

#include "fsoacq/detector.hpp"

namespace fsoacq {

/// Acquisition-time upper-bound model T_U = T_s X + T_d W: X geometric
/// failed-scan count with success probability 1 - p, W exponential with mean
/// 2 sigma0^2 / rho^2 dwells (final partial scan), beta = rho^2 / (2 T_d
/// sigma0^2) the rate of T_d W.
struct AcqTimeModel {
  double p = 0.0;      // per-scan miss probability bound
  double ts_s = 0.0;   // full-scan duration
  double td_s = 0.0;   // per-step dwell
  double beta = 0.0;   // 1 / E[T_d W]
};

AcqTimeModel make_acq_model(double p, double ts_s, double td_s, double rho_m,
                            double sigma0_m);

/// E[X] = p / (1 - p).
double expected_failed_scans(double p);

/// E[W] = 2 sigma0^2 / rho^2 (in dwells).
double expected_final_scan_steps(double sigma0_m, double rho_m);

/// Loosened closed-form mean bound:
///   (Ru^2/rho^2) T_d G^e / (1 - G^e) + T_d 2 sigma0^2 / rho^2,
/// G = Q(k_s gamma0 + 1, k_s mu_s), e = |A|/(4 rho^2) - L/rho - 2.
/// Requires e >= 1 (throws std::domain_error otherwise).
struct MeanTimeBound {
  double value_s = 0.0;
  double g = 0.0;         // per-look miss factor G
  double exponent = 0.0;  // e
};

MeanTimeBound mean_acq_time_upper_bound(double array_area, double array_side,
                                        const MomentSummary& mom,
                                        double gamma0, double ru_m,
                                        double td_s, double sigma0_m,
                                        double rho_m);

/// Density of T_U at t > 0:
///   beta (1-p) sum_{k=0}^{floor(t/Ts)} p^k exp(-beta (t - k Ts)).
double pdf_acq_time(const AcqTimeModel& model, double t_s);

/// P(T_U > gamma), closed form with n = ceil(gamma/Ts) decay terms plus the
/// p^n tail; the geometric ratio p e^{beta Ts} = 1 case falls back to the
/// equal-term sum.
double ccdf_acq_time(const AcqTimeModel& model, double gamma_s);

}  // namespace fsoacq
