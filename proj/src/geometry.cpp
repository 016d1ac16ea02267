#include "fsoacq/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace fsoacq {

ArrayGeometry make_array_geometry(int cells_per_side, double side_m) {
  if (cells_per_side < 1)
    throw std::invalid_argument("geometry: cells_per_side must be >= 1");
  if (!(side_m > 0.0))
    throw std::invalid_argument("geometry: side_m must be > 0");
  return ArrayGeometry{cells_per_side, side_m};
}

int cell_count(const ArrayGeometry& geom) {
  return geom.cells_per_side * geom.cells_per_side;
}

double array_area(const ArrayGeometry& geom) {
  return geom.side_m * geom.side_m;
}

double cell_area(const ArrayGeometry& geom) {
  const double pitch = geom.side_m / geom.cells_per_side;
  return pitch * pitch;
}

CellBounds cell_bounds(const ArrayGeometry& geom, int m) {
  if (m < 0 || m >= cell_count(geom))
    throw std::out_of_range("geometry: cell index out of range");
  const int n = geom.cells_per_side;
  const double pitch = geom.side_m / n;
  const double half = 0.5 * geom.side_m;
  const int row = m / n;
  const int col = m % n;
  return CellBounds{-half + col * pitch, -half + (col + 1) * pitch,
                    -half + row * pitch, -half + (row + 1) * pitch};
}

namespace {

// The count formulas sit exactly on integers for common parameters (e.g.
// rho dividing the side evenly), where a few ulps of rounding noise in the
// quotient would push floor/ceil to the neighboring integer. Absorb that
// noise; the band is far below the spacing of any realistic count.
double floor_fuzzy(double x) {
  return std::floor(x + 1e-12 * std::max(1.0, std::abs(x)));
}

double ceil_fuzzy(double x) {
  return std::ceil(x - 1e-12 * std::max(1.0, std::abs(x)));
}

}  // namespace

PackingCounts packing_counts(double area, double side, double rho) {
  if (!(area > 0.0)) throw std::invalid_argument("packing: area must be > 0");
  if (!(side > 0.0)) throw std::invalid_argument("packing: side must be > 0");
  if (!(rho > 0.0)) throw std::invalid_argument("packing: rho must be > 0");
  PackingCounts out;
  out.n0 = static_cast<std::int64_t>(floor_fuzzy(area / (4.0 * rho * rho)));
  out.n1 = static_cast<std::int64_t>(
      ceil_fuzzy(area * std::sqrt(3.0) / (6.0 * rho * rho)));
  const double raw = floor_fuzzy(static_cast<double>(out.n0) - side / rho);
  if (raw >= 1.0) {
    out.full_overlap_floor = static_cast<std::int64_t>(raw);
    out.floor_valid = true;
  } else {
    out.full_overlap_floor = 1;
    out.floor_valid = false;
  }
  return out;
}

}  // namespace fsoacq
