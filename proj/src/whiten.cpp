#include "fsoacq/whiten.hpp"

#include <cmath>
#include <stdexcept>

#include "fsoacq/rng.hpp"

namespace fsoacq {
namespace {

constexpr std::uint32_t kOpWhitenOriginal = 0x57u;
constexpr std::uint32_t kOpWhitenTransformed = 0x58u;

void validate_spd(const Cov2& cov) {
  if (!(cov.xx > 0.0) || !(cov.yy > 0.0) ||
      !(cov.xx * cov.yy - cov.xy * cov.xy > 0.0))
    throw std::invalid_argument("whiten: covariance must be positive definite");
}

struct Eig2 {
  double l1, l2;          // l1 >= l2 > 0
  double v1x, v1y;        // unit eigenvector for l1
};

// Closed-form symmetric 2x2 eigendecomposition; the second eigenvector is
// the first rotated by +90 degrees, so Q = [v1 v2] is a proper rotation.
Eig2 eig_sym(const Cov2& cov) {
  Eig2 e;
  const double tr = cov.xx + cov.yy;
  const double diff = cov.xx - cov.yy;
  const double disc = std::hypot(diff, 2.0 * cov.xy);
  e.l1 = 0.5 * (tr + disc);
  e.l2 = 0.5 * (tr - disc);
  if (disc == 0.0) {
    e.v1x = 1.0;
    e.v1y = 0.0;
    return e;
  }
  // Pick the better-conditioned residual column.
  double vx, vy;
  if (diff >= 0.0) {
    vx = 0.5 * (diff + disc);
    vy = cov.xy;
  } else {
    vx = cov.xy;
    vy = 0.5 * (disc - diff);
  }
  const double norm = std::hypot(vx, vy);
  e.v1x = vx / norm;
  e.v1y = vy / norm;
  return e;
}

double det2(const Mat2& m) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

}  // namespace

Whitening whitening_transform(const Cov2& cov) {
  validate_spd(cov);
  const Eig2 e = eig_sym(cov);
  Whitening w;
  w.lambda_max = e.l1;
  w.lambda_min = e.l2;
  // M = Lambda^{-1/2} Q^T has det (l1 l2)^{-1/2} > 0 (Q is a rotation);
  // dividing by sqrt(det M) makes det T = 1 exactly.
  const double s1 = 1.0 / std::sqrt(e.l1);
  const double s2 = 1.0 / std::sqrt(e.l2);
  const Mat2 m{{{s1 * e.v1x, s1 * e.v1y}, {s2 * -e.v1y, s2 * e.v1x}}};
  const double scale = 1.0 / std::sqrt(std::sqrt(1.0 / (e.l1 * e.l2)));
  w.t = Mat2{{{m[0][0] * scale, m[0][1] * scale},
              {m[1][0] * scale, m[1][1] * scale}}};
  w.det_t = det2(w.t);
  w.sigma_prime = std::sqrt(e.l1 * e.l2);
  return w;
}

Mat2 spectral_sqrt(const Cov2& cov) {
  validate_spd(cov);
  const Eig2 e = eig_sym(cov);
  const double r1 = std::sqrt(e.l1);
  const double r2 = std::sqrt(e.l2);
  const double vx = e.v1x, vy = e.v1y;
  return Mat2{{{r1 * vx * vx + r2 * vy * vy, (r1 - r2) * vx * vy},
               {(r1 - r2) * vx * vy, r1 * vy * vy + r2 * vx * vx}}};
}

Mat2 transformed_cov(const Cov2& cov, const Whitening& w) {
  // T Sigma T^T
  const Mat2& t = w.t;
  const double a = t[0][0] * cov.xx + t[0][1] * cov.xy;
  const double b = t[0][0] * cov.xy + t[0][1] * cov.yy;
  const double c = t[1][0] * cov.xx + t[1][1] * cov.xy;
  const double d = t[1][0] * cov.xy + t[1][1] * cov.yy;
  return Mat2{{{a * t[0][0] + b * t[0][1], a * t[1][0] + b * t[1][1]},
               {c * t[0][0] + d * t[0][1], c * t[1][0] + d * t[1][1]}}};
}

double whitened_region_radius(const Cov2& cov, double sigma_scale) {
  validate_spd(cov);
  if (!(sigma_scale > 0.0))
    throw std::invalid_argument("whiten: sigma_scale must be > 0");
  const double det = cov.xx * cov.yy - cov.xy * cov.xy;
  return sigma_scale * std::sqrt(std::sqrt(det));
}

MassCheck verify_probability_preservation(const Cov2& cov, double sigma_scale,
                                          std::uint64_t n_trials,
                                          std::uint64_t seed) {
  validate_spd(cov);
  if (!(sigma_scale > 0.0))
    throw std::invalid_argument("whiten: sigma_scale must be > 0");
  if (n_trials == 0)
    throw std::invalid_argument("whiten: n_trials must be > 0");
  const Whitening w = whitening_transform(cov);
  const double c2 = sigma_scale * sigma_scale;

  // Sigma^{-1} for the membership test x^T Sigma^{-1} x <= c^2.
  const double det = cov.xx * cov.yy - cov.xy * cov.xy;
  const double ixx = cov.yy / det, ixy = -cov.xy / det, iyy = cov.xx / det;

  // Cholesky factor of Sigma for sampling the original variable.
  const double l11 = std::sqrt(cov.xx);
  const double l21 = cov.xy / l11;
  const double l22 = std::sqrt(cov.yy - l21 * l21);

  // T^{-1} (det T = 1) for membership in the image region T(B).
  const double t_ixx = w.t[1][1], t_ixy = -w.t[0][1];
  const double t_iyx = -w.t[1][0], t_iyy = w.t[0][0];
  const double sp = std::sqrt(w.sigma_prime);

  std::uint64_t hits_orig = 0;
  std::uint64_t hits_trans = 0;
  for (std::uint64_t i = 0; i < n_trials; ++i) {
    RngStream rng_o(seed, kOpWhitenOriginal, static_cast<std::uint32_t>(i));
    const double z1 = rng_o.normal();
    const double z2 = rng_o.normal();
    const double x = l11 * z1;
    const double y = l21 * z1 + l22 * z2;
    if (ixx * x * x + 2.0 * ixy * x * y + iyy * y * y <= c2) ++hits_orig;

    RngStream rng_t(seed, kOpWhitenTransformed, static_cast<std::uint32_t>(i));
    const double xp = sp * rng_t.normal();
    const double yp = sp * rng_t.normal();
    const double bx = t_ixx * xp + t_ixy * yp;
    const double by = t_iyx * xp + t_iyy * yp;
    if (ixx * bx * bx + 2.0 * ixy * bx * by + iyy * by * by <= c2)
      ++hits_trans;
  }
  MassCheck out;
  out.n_trials = n_trials;
  out.mass_original = static_cast<double>(hits_orig) / n_trials;
  out.mass_transformed = static_cast<double>(hits_trans) / n_trials;
  out.diff = out.mass_original - out.mass_transformed;
  const double v = out.mass_original * (1.0 - out.mass_original) +
                   out.mass_transformed * (1.0 - out.mass_transformed);
  out.half_width_95 = 1.96 * std::sqrt(v / static_cast<double>(n_trials));
  return out;
}

double scan_time_bound(const Cov2& cov, double sigma_scale, double rho_m,
                       double td_s, double a) {
  if (!(rho_m > 0.0)) throw std::invalid_argument("scan_time_bound: rho_m > 0");
  if (!(td_s > 0.0)) throw std::invalid_argument("scan_time_bound: td_s > 0");
  if (!(a >= 1.0)) throw std::invalid_argument("scan_time_bound: a must be >= 1");
  const double r = whitened_region_radius(cov, sigma_scale);
  const double q = (r / rho_m) * (r / rho_m);
  return a * td_s * std::ceil(q);
}

std::int64_t covering_dwell_count(double area_m2, double rho_m) {
  if (!(area_m2 >= 0.0))
    throw std::invalid_argument("covering_dwell_count: area must be >= 0");
  if (!(rho_m > 0.0))
    throw std::invalid_argument("covering_dwell_count: rho must be > 0");
  // A footprint of radius rho covers at most an inscribed regular hexagon,
  // area (3 sqrt(3) / 2) rho^2, in a gap-free covering.
  const double eff = 1.5 * std::sqrt(3.0) * rho_m * rho_m;
  return static_cast<std::int64_t>(std::ceil(area_m2 / eff));
}

}  // namespace fsoacq
