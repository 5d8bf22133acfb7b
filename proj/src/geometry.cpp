#include "cellrate/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cellrate {

PointSet sample_uniform_disk(std::size_t n, const DiskRegion& region, RngStream& rng) {
  PointSet pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = region.radius * std::sqrt(rng.next_double());
    const double theta = 2.0 * M_PI * rng.next_double();
    pts.emplace_back(r * std::cos(theta), r * std::sin(theta));
  }
  return pts;
}

PointSet hex_lattice(const HexLayout& layout) {
  const double d = layout.spacing;
  if (d <= 0.0) throw std::invalid_argument("hex_lattice: spacing must be positive");
  PointSet pts;
  pts.emplace_back(0.0, 0.0);
  if (layout.extent <= 0.0) return pts;
  const double ext2 = layout.extent * layout.extent;
  // basis a1 = (d, 0), a2 = (d/2, d*sqrt(3)/2)
  const int jmax = static_cast<int>(std::ceil(layout.extent / (d * kSqrt3 / 2.0))) + 1;
  for (int j = -jmax; j <= jmax; ++j) {
    const double y = j * d * kSqrt3 / 2.0;
    const int imax = static_cast<int>(std::ceil(layout.extent / d + std::abs(j) / 2.0)) + 1;
    for (int i = -imax; i <= imax; ++i) {
      if (i == 0 && j == 0) continue;
      const double x = (i + 0.5 * j) * d;
      if (x * x + y * y <= ext2) pts.emplace_back(x, y);
    }
  }
  return pts;
}

std::size_t sample_poisson_count(double mean, RngStream& rng) {
  if (mean <= 0.0) return 0;
  // Exponential inter-arrival accumulation; exact and branch-stable.
  std::size_t count = 0;
  double acc = -std::log(rng.next_open_double());
  while (acc <= mean) {
    ++count;
    acc += -std::log(rng.next_open_double());
  }
  return count;
}

PointSet sample_ppp_disk(const PppLayout& layout, RngStream& rng) {
  const double area = M_PI * layout.extent * layout.extent;
  const std::size_t n = sample_poisson_count(layout.intensity * area, rng);
  const DiskRegion region{layout.extent};
  return sample_uniform_disk(n, region, rng);
}

std::pair<std::size_t, double> nearest_base_station(const Point2& p, const PointSet& bases) {
  if (bases.empty())
    throw std::invalid_argument("nearest_base_station: empty base set");
  std::size_t best = 0;
  double best2 = (p - bases[0]).squaredNorm();
  for (std::size_t i = 1; i < bases.size(); ++i) {
    const double d2 = (p - bases[i]).squaredNorm();
    if (d2 < best2) {
      best2 = d2;
      best = i;
    }
  }
  return {best, std::sqrt(best2)};
}

NearestNeighborGrid::NearestNeighborGrid(PointSet points, double bucket_width)
    : points_(std::move(points)) {
  if (points_.empty())
    throw std::invalid_argument("NearestNeighborGrid: empty point set");
  if (!(bucket_width > 0.0))
    throw std::invalid_argument("NearestNeighborGrid: bucket width must be positive");
  double max_x = points_[0].x(), max_y = points_[0].y();
  min_x_ = points_[0].x();
  min_y_ = points_[0].y();
  for (const auto& p : points_) {
    min_x_ = std::min(min_x_, p.x());
    min_y_ = std::min(min_y_, p.y());
    max_x = std::max(max_x, p.x());
    max_y = std::max(max_y, p.y());
  }
  width_ = bucket_width;
  nx_ = std::max(1, static_cast<int>((max_x - min_x_) / width_) + 1);
  ny_ = std::max(1, static_cast<int>((max_y - min_y_) / width_) + 1);
  buckets_.resize(static_cast<std::size_t>(nx_) * ny_);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const int cx = cell_x(points_[i].x());
    const int cy = cell_y(points_[i].y());
    buckets_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(static_cast<std::uint32_t>(i));
  }
}

int NearestNeighborGrid::cell_x(double x) const {
  const int c = static_cast<int>(std::floor((x - min_x_) / width_));
  return std::clamp(c, 0, nx_ - 1);
}

int NearestNeighborGrid::cell_y(double y) const {
  const int c = static_cast<int>(std::floor((y - min_y_) / width_));
  return std::clamp(c, 0, ny_ - 1);
}

std::pair<std::size_t, double> NearestNeighborGrid::query(const Point2& p) const {
  const int cx = cell_x(p.x());
  const int cy = cell_y(p.y());
  std::size_t best = points_.size();
  double best2 = std::numeric_limits<double>::infinity();
  const int ring_max = std::max(nx_, ny_);

  for (int ring = 0; ring <= ring_max; ++ring) {
    // Every point in a ring-r cell is at least (r-1)*width away from p
    // (ring offsets are measured from p's clamped cell), so once that bound
    // exceeds the best hit the scan is complete.
    if (ring > 0 && best < points_.size()) {
      const double lower = (ring - 1) * width_;
      if (lower * lower > best2) break;
    }
    const int x_lo = cx - ring, x_hi = cx + ring;
    const int y_lo = cy - ring, y_hi = cy + ring;
    auto scan_cell = [&](int x, int y) {
      if (x < 0 || x >= nx_ || y < 0 || y >= ny_) return;
      for (const std::uint32_t idx : buckets_[static_cast<std::size_t>(y) * nx_ + x]) {
        const double d2 = (p - points_[idx]).squaredNorm();
        if (d2 < best2 || (d2 == best2 && idx < best)) {
          best2 = d2;
          best = idx;
        }
      }
    };
    if (ring == 0) {
      scan_cell(cx, cy);
    } else {
      for (int x = x_lo; x <= x_hi; ++x) {
        scan_cell(x, y_lo);
        scan_cell(x, y_hi);
      }
      for (int y = y_lo + 1; y <= y_hi - 1; ++y) {
        scan_cell(x_lo, y);
        scan_cell(x_hi, y);
      }
    }
  }
  return {best, std::sqrt(best2)};
}

double hex_link_pdf(double x, double spacing) {
  const double d = spacing;
  const double xmax = d / kSqrt3;
  if (x <= 0.0 || x >= xmax) return 0.0;
  const double base = 4.0 * M_PI / (kSqrt3 * d * d) * x;
  if (x < d / 2.0) return base;
  return base - 8.0 * kSqrt3 * x / (d * d) * std::acos(d / (2.0 * x));
}

double hex_link_cdf(double x, double spacing) {
  const double d = spacing;
  if (x <= 0.0) return 0.0;
  if (x >= d / kSqrt3) return 1.0;
  const double base = 2.0 * kSqrt3 * M_PI * x * x / (3.0 * d * d);
  if (x < d / 2.0) return base;
  return base - 4.0 * kSqrt3 * x * x / (d * d) * std::acos(d / (2.0 * x)) +
         2.0 * kSqrt3 * std::sqrt(x * x / (d * d) - 0.25);
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
struct GaussLegendre {
  std::array<double, 64> node;
  std::array<double, 64> weight;
  GaussLegendre() {
    const int n = 64;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
        }
        pp = n * (x * p0 - p1) / (x * x - 1.0);
        const double dx = p0 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      node[i] = -x;
      node[n - 1 - i] = x;
      weight[i] = weight[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
  }
};

const GaussLegendre& gl64() {
  static const GaussLegendre g;
  return g;
}

}  // namespace

double hex_link_moment(double k, double spacing) {
  if (!(k > -2.0))
    throw std::invalid_argument("hex_link_moment: requires k > -2");
  const auto& g = gl64();
  const double a = 0.0, b = M_PI / 6.0;
  double sum = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double t = 0.5 * (b - a) * g.node[i] + 0.5 * (a + b);
    sum += g.weight[i] * std::pow(std::cos(t), -(k + 2.0));
  }
  sum *= 0.5 * (b - a);
  return 2.0 * kSqrt3 / (k + 2.0) * std::pow(spacing / 2.0, k) * sum;
}

double hex_link_partial_second_moment(double x, double spacing) {
  const double d = spacing;
  const double xmax = d / kSqrt3;
  if (x <= 0.0) return 0.0;
  x = std::min(x, xmax);
  const double lead = M_PI * x * x * x * x / (kSqrt3 * d * d);
  if (x <= d / 2.0) return lead;
  // int x^3 acos(d/2x) dx = x^4/4 acos(d/2x) - d/4 (u^{3/2}/48 + d^2 sqrt(u)/16),
  // u = 4x^2 - d^2 (vanishes at x = d/2).
  const double u = 4.0 * x * x - d * d;
  const double su = std::sqrt(u);
  const double anti = 0.25 * x * x * x * x * std::acos(d / (2.0 * x)) -
                      0.25 * d * (u * su / 48.0 + d * d * su / 16.0);
  return lead - 8.0 * kSqrt3 / (d * d) * anti;
}

double sample_hex_link(double spacing, RngStream& rng) {
  const double d = spacing;
  double u = rng.next_double();
  double v = rng.next_double();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  // vertices (0,0), (d,0), (d/2, d*sqrt(3)/2)
  const double px = u * d + v * d * 0.5;
  const double py = v * d * kSqrt3 / 2.0;
  const double d0 = px * px + py * py;
  const double d1 = (px - d) * (px - d) + py * py;
  const double cy = d * kSqrt3 / 2.0;
  const double d2 = (px - 0.5 * d) * (px - 0.5 * d) + (py - cy) * (py - cy);
  return std::sqrt(std::min({d0, d1, d2}));
}

double ppp_link_pdf(double r, double intensity) {
  if (r <= 0.0) return 0.0;
  const double a = M_PI * intensity;
  return 2.0 * a * r * std::exp(-a * r * r);
}

double ppp_link_cdf(double r, double intensity) {
  if (r <= 0.0) return 0.0;
  return -std::expm1(-M_PI * intensity * r * r);
}

double sample_ppp_link(double intensity, RngStream& rng) {
  return std::sqrt(-std::log(rng.next_open_double()) / (M_PI * intensity));
}

}  // namespace cellrate
