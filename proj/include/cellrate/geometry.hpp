#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <utility>
#include <vector>

#include "cellrate/rng.hpp"

namespace cellrate {

using Point2 = Eigen::Vector2d;
using PointSet = std::vector<Point2>;

inline constexpr double kSqrt3 = 1.7320508075688772935;

// Circular deployment region centered at the origin.
struct DiskRegion {
  double radius = 0.0;  // m
};

// Triangular lattice of base-station sites: nearest-neighbor distance
// `spacing`, all sites within `extent` of the origin, one site at the origin.
struct HexLayout {
  double spacing = 0.0;  // m
  double extent = 0.0;   // m
};

// Homogeneous Poisson field of base stations on a disk.
struct PppLayout {
  double intensity = 0.0;  // sites / m^2
  double extent = 0.0;     // m
};

// Site density of the triangular lattice with the given spacing.
inline double hex_site_density(double spacing) {
  return 2.0 / (kSqrt3 * spacing * spacing);
}

inline double hex_spacing_for_density(double density) {
  return std::sqrt(2.0 / (kSqrt3 * density));
}

// Inverts n = rho * pi * R^2.
inline double disk_radius_for_count(double n, double density) {
  return std::sqrt(n / (M_PI * density));
}

// n IID points, area-uniform over the disk (radius via sqrt-scaling).
PointSet sample_uniform_disk(std::size_t n, const DiskRegion& region, RngStream& rng);

// All lattice sites within `extent` of the origin; sites[0] is the origin.
PointSet hex_lattice(const HexLayout& layout);

// Poisson-distributed count, IID uniform positions.
PointSet sample_ppp_disk(const PppLayout& layout, RngStream& rng);

std::size_t sample_poisson_count(double mean, RngStream& rng);

// Exhaustive nearest-neighbor scan; ties break to the lowest index.
// Throws std::invalid_argument on an empty base set.
std::pair<std::size_t, double> nearest_base_station(const Point2& p, const PointSet& bases);

// Uniform bucket grid for repeated nearest-neighbor queries against a fixed
// point set. Exact: scans outward ring by ring until no closer point can
// exist. Read-only after construction, safe for concurrent queries.
class NearestNeighborGrid {
 public:
  NearestNeighborGrid(PointSet points, double bucket_width);

  std::pair<std::size_t, double> query(const Point2& p) const;

  const PointSet& points() const { return points_; }

 private:
  PointSet points_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  double min_x_ = 0.0, min_y_ = 0.0, width_ = 1.0;
  int nx_ = 1, ny_ = 1;

  int cell_x(double x) const;
  int cell_y(double y) const;
};

// Link-length law for hexagonal cells (distance from a uniform point to the
// nearest lattice site), support [0, sqrt(3)/3 * spacing].
double hex_link_pdf(double x, double spacing);
double hex_link_cdf(double x, double spacing);

// k-th moment of the hex link length, k > -2. The angular integral is
// evaluated with fixed-order Gauss-Legendre (64 nodes); the integrand
// sec(t)^(k+2) is smooth on [0, pi/6].
double hex_link_moment(double k, double spacing);

// int_0^x t^2 f(t) dt in closed form; needed for truncated power moments.
double hex_link_partial_second_moment(double x, double spacing);

// Draws a hex link length: uniform point in an equilateral triangle of side
// `spacing`, distance to the nearest vertex.
double sample_hex_link(double spacing, RngStream& rng);

// Nearest-base-station distance law under a PPP: 2*pi*rho*r*exp(-pi*rho*r^2).
double ppp_link_pdf(double r, double intensity);
double ppp_link_cdf(double r, double intensity);
double sample_ppp_link(double intensity, RngStream& rng);

}  // namespace cellrate
