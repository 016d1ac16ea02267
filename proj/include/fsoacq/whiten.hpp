#pragma once

#include <array>
#include <cstdint>

namespace fsoacq {

/// 2x2 symmetric positive-definite covariance of the a-priori pointing
/// uncertainty (meters^2).
struct Cov2 {
  double xx = 1.0;
  double xy = 0.0;
  double yy = 1.0;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

/// Volume-preserving whitening T = Lambda^{-1/2} Q^T normalized to det 1;
/// the transformed covariance Sigma' = (T sqrt(Sigma))(T sqrt(Sigma))^T is
/// isotropic with scale sqrt(det Sigma).
struct Whitening {
  Mat2 t{};                 // the transform
  double det_t = 1.0;       // numerically computed determinant (== 1)
  double sigma_prime = 1.0; // Sigma' = sigma_prime * I
  double lambda_max = 1.0;  // eigenvalues of Sigma
  double lambda_min = 1.0;
};

/// Throws std::invalid_argument unless cov is symmetric positive definite.
Whitening whitening_transform(const Cov2& cov);

/// Spectral (eigendecomposition) square root of cov.
Mat2 spectral_sqrt(const Cov2& cov);

/// T Sigma T^T for the computed transform (isotropy check).
Mat2 transformed_cov(const Cov2& cov, const Whitening& w);

/// Radius of the whitened image of the c-sigma ellipse
/// B = {x : x^T Sigma^{-1} x <= c^2}: T(B) is a disc of radius
/// c * det(Sigma)^{1/4}.
double whitened_region_radius(const Cov2& cov, double sigma_scale);

/// Monte Carlo check that the transform preserves probability mass:
/// P(X in B) for X ~ N(0, Sigma) versus P(X' in T(B)) for X' ~ N(0, Sigma').
struct MassCheck {
  double mass_original = 0.0;
  double mass_transformed = 0.0;
  double diff = 0.0;
  double half_width_95 = 0.0;  // on the difference
  std::uint64_t n_trials = 0;
};

MassCheck verify_probability_preservation(const Cov2& cov, double sigma_scale,
                                          std::uint64_t n_trials,
                                          std::uint64_t seed);

/// Scan-time bookkeeping for the whitened region: a * T_d * ceil(R^2/rho^2)
/// with R = whitened_region_radius. a = 1 reproduces the nominal estimate;
/// a = 2 upper-bounds the covering-based scan times of both B and T(B).
double scan_time_bound(const Cov2& cov, double sigma_scale, double rho_m,
                       double td_s, double a = 1.0);

/// Dwell count to cover a region of the given area with footprints of
/// radius rho under a hexagonal covering (inscribed-hexagon effective area).
std::int64_t covering_dwell_count(double area_m2, double rho_m);

}  // namespace fsoacq
