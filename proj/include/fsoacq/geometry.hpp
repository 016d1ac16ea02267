#pragma once

#include <cstdint>

namespace fsoacq {

/// Square detector array: cells_per_side x cells_per_side equal square cells
/// tiling an L x L aperture centered on the origin.
struct ArrayGeometry {
  int cells_per_side = 1;   // N; M = N*N cells
  double side_m = 1.0;      // L
};

struct CellBounds {
  double x_lo, x_hi, y_lo, y_hi;
};

/// Throws std::invalid_argument on non-positive side or cell count.
ArrayGeometry make_array_geometry(int cells_per_side, double side_m);

int cell_count(const ArrayGeometry& geom);
double array_area(const ArrayGeometry& geom);
double cell_area(const ArrayGeometry& geom);

/// Bounds of cell m, row-major from the lower-left cell (m = row * N + col).
/// Throws std::out_of_range for m outside [0, N*N).
CellBounds cell_bounds(const ArrayGeometry& geom, int m);

/// Footprint-packing counts for a beam of radius rho over an area-|A| array
/// of side L (the scan-bound exponents).
struct PackingCounts {
  std::int64_t n0 = 0;                  // floor(|A| / (4 rho^2))
  std::int64_t n1 = 0;                  // ceil(|A| sqrt(3) / (6 rho^2))
  std::int64_t full_overlap_floor = 1;  // floor(n0 - L/rho), clamped to >= 1
  bool floor_valid = true;              // false when the clamp was applied
};

PackingCounts packing_counts(double area, double side, double rho);

}  // namespace fsoacq
