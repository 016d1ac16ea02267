#pragma once

#include <cstdint>
#include <functional>
#include <vector>

// Independent reference implementations used only to check the library:
// quadrature instead of closed forms, exact/Boost special functions instead
// of the in-tree kernels, and classical GOF statistics.
namespace testsupport {

/// Adaptive Simpson on [a, b] to the requested absolute tolerance.
double integrate1d(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-13);

/// Tensor 2-D integral over [ax,bx] x [ay,by] (adaptive Simpson nested).
double integrate2d(const std::function<double(double, double)>& f, double ax,
                   double bx, double ay, double by, double tol = 1e-12);

/// P(Poisson(mean) <= k), exact via Boost's incomplete-gamma machinery.
double poisson_cdf(double mean, std::int64_t k);

/// P(Poisson(mean) >= k).
double poisson_sf(double mean, std::int64_t k);

/// Upper-tail p-value of a chi-square statistic.
double chi_square_p_value(double stat, double dof);

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

/// Chi-square GOF p-value for integer draws against Poisson(mean): bins are
/// chosen so every expected count is >= 5 (tails pooled).
double poisson_gof_p_value(const std::vector<std::int64_t>& draws, double mean);

}  // namespace testsupport
