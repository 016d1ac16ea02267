#pragma once

#include <span>

namespace fsoacq {

/// Standard normal CDF, evaluated through erfc so deep tails keep full
/// relative accuracy.
double normal_cdf(double t);

/// Phi(b) - Phi(a). Each endpoint is evaluated from the tail nearest zero,
/// which avoids the 1 - tiny cancellation when both arguments sit far out
/// on the same side (|t| > 6 is routine here).
double normal_cdf_diff(double a, double b);

/// Regularized upper incomplete gamma Q(a, y) = Gamma(a, y) / Gamma(a),
/// a > 0, y >= 0. Series for y < a + 1, Lentz continued fraction otherwise.
/// For integer a this is the Poisson CDF: Q(n, y) = P(Poisson(y) <= n - 1).
double reg_gamma_q(double a, double y);

/// Compensated (Neumaier) summation.
double neumaier_sum(std::span<const double> values);

}  // namespace fsoacq
