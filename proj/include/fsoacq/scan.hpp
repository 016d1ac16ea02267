#pragma once

#include <cstdint>
#include <vector>

namespace fsoacq {

struct SpiralPoint {
  double r_m = 0.0;
  double theta_rad = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
};

/// Archimedean scan path r = b * theta sampled at uniform arc-length steps.
struct ScanPlan {
  double b_m = 0.0;            // spiral pitch / (2 pi) spacing between turns is 2 pi b
  double step_m = 0.0;         // arc-length spacing between dwells
  double ru_m = 0.0;           // uncertainty-region radius
  std::vector<SpiralPoint> points;
};

/// Build the spiral for an uncertainty region of radius ru. Both the pitch
/// and the arc step are 2 * rho * (1 - overlap), so adjacent footprints
/// overlap by the given margin (default 0.5 => spacing rho). Points start at
/// the center and stop at the first point with r >= ru; when ru < step the
/// plan is the center point alone.
ScanPlan build_spiral(double ru_m, double rho_m, double overlap = 0.5);

/// N_s = ceil(ru^2 / rho^2), the per-scan step-count bound used by the
/// acquisition-time model.
std::int64_t steps_per_scan(double ru_m, double rho_m);

/// T_d = T_r + R / c. T_r must exceed the per-pulse observation interval.
double dwell_time(double receiver_processing_s, double range_m,
                  double observation_interval_s = 0.0);

/// Exact arc length of r = b*theta from the origin to angle theta.
double spiral_arc_length(double b_m, double theta_rad);

}  // namespace fsoacq
