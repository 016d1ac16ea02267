#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "fsoacq/scan.hpp"

using fsoacq::build_spiral;
using fsoacq::dwell_time;
using fsoacq::ScanPlan;
using fsoacq::spiral_arc_length;
using fsoacq::steps_per_scan;

TEST_SUITE("scan") {

TEST_CASE("spiral starts at the center and steps one arc length") {
  const ScanPlan plan = build_spiral(5.0, 0.1);
  REQUIRE(plan.points.size() > 2);
  CHECK(plan.points[0].r_m == 0.0);
  CHECK(plan.points[0].theta_rad == 0.0);
  CHECK(plan.b_m == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(plan.step_m == doctest::Approx(0.1).epsilon(1e-15));
  const double arc1 = spiral_arc_length(plan.b_m, plan.points[1].theta_rad);
  CHECK(arc1 == doctest::Approx(plan.step_m).epsilon(0.01));
}

TEST_CASE("every point lies on the spiral") {
  const ScanPlan plan = build_spiral(5.0, 0.1, 0.4);
  for (const auto& p : plan.points) {
    CHECK(std::abs(p.r_m - plan.b_m * p.theta_rad) <=
          1e-9 * std::max(1.0, p.r_m));
    CHECK(p.x_m == doctest::Approx(p.r_m * std::cos(p.theta_rad)).epsilon(1e-12));
    CHECK(p.y_m == doctest::Approx(p.r_m * std::sin(p.theta_rad)).epsilon(1e-12));
  }
  CHECK(plan.points.back().r_m >= plan.ru_m);
}

TEST_CASE("the step-count bound holds at figure scale") {
  const ScanPlan plan = build_spiral(50.0, 0.2);
  CHECK(plan.points.size() <= 62500);
  CHECK(plan.points.size() > 20000);  // sanity: not trivially sparse
}

TEST_CASE("angle increments shrink as the spiral grows") {
  const ScanPlan plan = build_spiral(5.0, 0.1);
  double prev_inc = -1.0;
  for (std::size_t i = 1; i < plan.points.size(); ++i) {
    const double inc =
        plan.points[i].theta_rad - plan.points[i - 1].theta_rad;
    CHECK(inc > 0.0);
    if (plan.points[i - 1].theta_rad > 2.0 * M_PI && prev_inc > 0.0) {
      CHECK(inc < prev_inc);
    }
    prev_inc = inc;
  }
}

TEST_CASE("arc-length gaps are uniform past the first turn") {
  const ScanPlan plan = build_spiral(5.0, 0.1);
  for (std::size_t i = 1; i < plan.points.size(); ++i) {
    if (plan.points[i - 1].theta_rad <= 2.0 * M_PI) continue;
    const double gap = spiral_arc_length(plan.b_m, plan.points[i].theta_rad) -
                       spiral_arc_length(plan.b_m, plan.points[i - 1].theta_rad);
    CHECK(std::abs(gap - plan.step_m) / plan.step_m < 0.02);
  }
}

TEST_CASE("a dense overlap covers the uncertainty disc within one footprint") {
  // pitch 2 pi b must drop below ~3 rho for full coverage, hence the high
  // overlap here; the default spacing trades coverage for the step-count
  // bound (both are reported by the plan).
  const double ru = 3.0;
  const double rho = 0.1;
  const ScanPlan plan = build_spiral(ru, rho, 0.85);

  // bucket scan points on a coarse grid for nearest-neighbor queries
  const double cell = rho;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  const auto key = [&](double x, double y) {
    const auto ix = static_cast<std::int64_t>(std::floor(x / cell));
    const auto iy = static_cast<std::int64_t>(std::floor(y / cell));
    return ix * 100003 + iy;
  };
  for (std::size_t i = 0; i < plan.points.size(); ++i) {
    buckets[key(plan.points[i].x_m, plan.points[i].y_m)].push_back(i);
  }
  const auto near = [&](double x, double y) {
    for (int dx = -2; dx <= 2; ++dx) {
      for (int dy = -2; dy <= 2; ++dy) {
        const auto it = buckets.find(key(x + dx * cell, y + dy * cell));
        if (it == buckets.end()) continue;
        for (std::size_t i : it->second) {
          const double ddx = plan.points[i].x_m - x;
          const double ddy = plan.points[i].y_m - y;
          if (ddx * ddx + ddy * ddy <= rho * rho) return true;
        }
      }
    }
    return false;
  };

  const double rim = ru - rho;
  int misses = 0;
  for (double x = -rim; x <= rim; x += 0.02) {
    for (double y = -rim; y <= rim; y += 0.02) {
      if (x * x + y * y > rim * rim) continue;
      if (!near(x, y)) ++misses;
    }
  }
  CHECK(misses == 0);
}

TEST_CASE("spiral input validation") {
  CHECK_THROWS_AS(build_spiral(0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_spiral(0.2, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(build_spiral(5.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(build_spiral(5.0, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_spiral(5.0, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("steps per scan") {
  CHECK(steps_per_scan(50.0, 0.2) == 62500);
  CHECK(steps_per_scan(1.0, 1.0) == 1);
  CHECK(steps_per_scan(1.0, 0.3) == 12);
}

TEST_CASE("dwell time") {
  CHECK(dwell_time(1e-3, 0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(dwell_time(1e-3, 3e5) == doctest::Approx(2e-3).epsilon(1e-12));
  CHECK_THROWS_AS(dwell_time(0.9e-3, 0.0, 1e-3), std::invalid_argument);
}

TEST_CASE("exact arc length formula") {
  // closed form (b/2)(t sqrt(1+t^2) + asinh t) against quadrature of
  // sqrt(r^2 + (dr/dtheta)^2) = b sqrt(1 + theta^2)
  const double b = 0.07;
  for (double t : {0.5, 2.0, 9.0, 40.0}) {
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = t * (i + 0.5) / n;
      sum += b * std::sqrt(1.0 + u * u) * (t / n);
    }
    CHECK(spiral_arc_length(b, t) == doctest::Approx(sum).epsilon(1e-6));
  }
}

}  // TEST_SUITE
