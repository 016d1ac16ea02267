#include "fsoacq/scan.hpp"

#include <cmath>
#include <stdexcept>

#include "fsoacq/beam.hpp"

namespace fsoacq {

double spiral_arc_length(double b_m, double theta_rad) {
  const double t = theta_rad;
  return 0.5 * b_m * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

ScanPlan build_spiral(double ru_m, double rho_m, double overlap) {
  if (!(rho_m > 0.0)) throw std::invalid_argument("build_spiral: rho_m must be > 0");
  if (!(ru_m > rho_m))
    throw std::invalid_argument(
        "build_spiral: uncertainty region smaller than beam");
  if (!(overlap > 0.0 && overlap < 1.0))
    throw std::invalid_argument("build_spiral: overlap must be in (0, 1)");

  ScanPlan plan;
  plan.b_m = 2.0 * rho_m * (1.0 - overlap);
  plan.step_m = plan.b_m;
  plan.ru_m = ru_m;
  plan.points.push_back(SpiralPoint{0.0, 0.0, 0.0, 0.0});
  if (ru_m < plan.step_m) return plan;

  const double b = plan.b_m;
  const double step = plan.step_m;
  double theta = 0.0;
  double arc = 0.0;
  // Generous cap: total length ru^2/(2b) plus slack.
  const std::size_t max_points =
      static_cast<std::size_t>(ru_m * ru_m / (2.0 * b * step) + 16.0) * 2;
  while (plan.points.back().r_m < ru_m && plan.points.size() < max_points) {
    // Advance by one arc step: theta_next solves b*theta_next*(theta_next -
    // theta) = step (the first-order recurrence, taking the positive root).
    double next =
        0.5 * (theta + std::sqrt(theta * theta + 4.0 * step / b));
    if (b * next < 2.0 * b) {
      // Near the center the first-order step overshoots; refine with one
      // Newton step on the exact arc-length integral.
      const double target = arc + step;
      const double f = spiral_arc_length(b, next) - target;
      const double fp = b * std::sqrt(1.0 + next * next);
      next -= f / fp;
      if (next < theta) next = theta;  // never walk backwards
    }
    theta = next;
    arc = spiral_arc_length(b, theta);
    const double r = b * theta;
    plan.points.push_back(
        SpiralPoint{r, theta, r * std::cos(theta), r * std::sin(theta)});
  }
  return plan;
}

std::int64_t steps_per_scan(double ru_m, double rho_m) {
  if (!(ru_m > 0.0)) throw std::invalid_argument("steps_per_scan: ru_m must be > 0");
  if (!(rho_m > 0.0)) throw std::invalid_argument("steps_per_scan: rho_m must be > 0");
  const double q = (ru_m / rho_m) * (ru_m / rho_m);
  const double snapped = std::round(q);
  if (std::abs(q - snapped) < 1e-9 * std::max(1.0, snapped))
    return static_cast<std::int64_t>(snapped);
  return static_cast<std::int64_t>(std::ceil(q));
}

double dwell_time(double receiver_processing_s, double range_m,
                  double observation_interval_s) {
  if (!(range_m >= 0.0))
    throw std::invalid_argument("dwell_time: range_m must be >= 0");
  if (!(observation_interval_s >= 0.0))
    throw std::invalid_argument("dwell_time: observation interval must be >= 0");
  if (!(receiver_processing_s > observation_interval_s))
    throw std::invalid_argument(
        "dwell_time: receiver processing time must exceed the observation interval");
  return receiver_processing_s + range_m / kLightSpeed;
}

}  // namespace fsoacq
