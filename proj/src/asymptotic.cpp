#include "cellrate/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cellrate/geometry.hpp"
#include "cellrate/quadrature.hpp"

namespace cellrate {

double g_alpha(double alpha) {
  if (!(alpha > 2.0)) throw std::invalid_argument("g_alpha: requires alpha > 2");
  return std::pow(alpha / (2.0 * M_PI) * std::sin(2.0 * M_PI / alpha), alpha / 2.0);
}

double hex_density_constant() { return 18.0 * kSqrt3 / (5.0 * M_PI); }

namespace {

// Outer integral of the fixed-point equation:
// J(beta) = int_0^inf tau^(-2/a)/(1 + tau beta) * M(tau/b) dtau,
// where M is the upper-truncated power moment. M vanishes above the power
// support, which bounds the domain at b * support_cut.
double outer_integral(const AsymptoticParams& params, double beta, double tol) {
  const double b = params.b();
  const double tau_max = b * params.dist.support_cut();
  if (!(tau_max > 0.0)) return 0.0;
  auto g = [&](double tau) {
    return params.dist.truncated_moment(tau / b) / (1.0 + tau * beta);
  };
  return quadrature_power_singularity(g, 2.0 / params.alpha, tau_max, tol);
}

}  // namespace

double fixed_point_residual(const AsymptoticParams& params, double beta) {
  const double a = params.alpha;
  const double rhs =
      std::pow(params.p1, a / 2.0) / (2.0 * params.rho_w * M_PI * params.r1 * params.r1);
  if (beta == 0.0) return -rhs;
  const double term1 = params.dist.moment() * std::pow(beta, 2.0 / a) *
                       (M_PI / a) / std::sin(2.0 * M_PI / a);
  const double coef2 = 2.0 * M_PI * params.rho_w * std::pow(params.r1, a - 2.0) /
                       (std::pow(params.p1, a / 2.0) * a);
  double term2 = 0.0;
  if (coef2 * beta > 0.0) {
    const double tol = 1e-12 * rhs / (coef2 * beta);
    term2 = -coef2 * beta * outer_integral(params, beta, tol);
  }
  const double term3 = beta * std::pow(params.r1, a - 2.0) * params.sigma2 /
                       (2.0 * params.gain * params.rho_w * M_PI *
                        std::pow(params.p1, 1.0 - a / 2.0));
  return term1 + term2 + term3 - rhs;
}

double solve_fixed_point(const AsymptoticParams& params) {
  if (!(params.alpha > 2.0) || !(params.rho_w > 0.0) || !(params.c > 0.0) ||
      !(params.r1 > 0.0) || !(params.p1 > 0.0) || params.sigma2 < 0.0)
    throw std::invalid_argument("solve_fixed_point: invalid parameters");
  const double a = params.alpha;
  const double rhs =
      std::pow(params.p1, a / 2.0) / (2.0 * params.rho_w * M_PI * params.r1 * params.r1);
  auto f = [&](double beta) { return fixed_point_residual(params, beta); };

  // Seed from the closed-form approximation, then doubling until the
  // residual changes sign; F(0) = -RHS < 0 anchors the bracket.
  double hi = sinr_approx(1.0, params.r1, params.p1, params.dist, params.rho_w, a);
  if (!(hi > 0.0) || !std::isfinite(hi))
    throw NumericError("solve_fixed_point: degenerate bracket seed");
  double fhi = f(hi);
  int doublings = 0;
  while (fhi <= 0.0) {
    if (++doublings > 64)
      throw NumericError("solve_fixed_point: no sign change after 64 bracket expansions");
    hi *= 2.0;
    fhi = f(hi);
  }
  return find_root_brent(f, 0.0, hi, -rhs, fhi, 1e-15, 300);
}

double sinr_approx(double n_antennas, double r1, double p1,
                   const PowerDistribution& dist, double rho_w, double alpha) {
  return p1 * g_alpha(alpha) *
         std::pow(n_antennas / (dist.moment() * M_PI * rho_w * r1 * r1), alpha / 2.0);
}

double mean_se_hex_sufficient(double n_antennas, double spacing, double rho_w,
                              double alpha) {
  const double mean_sq = 5.0 / 36.0 * spacing * spacing;
  return std::log2(1.0 + g_alpha(alpha) *
                             std::pow(n_antennas / (mean_sq * M_PI * rho_w), alpha / 2.0));
}

double mean_se_hex_by_density(double n_antennas, double rho_h, double rho_w,
                              double alpha, double density_constant) {
  return std::log2(1.0 + g_alpha(alpha) * std::pow(density_constant * n_antennas *
                                                       rho_h / rho_w,
                                                   alpha / 2.0));
}

double mean_se_hex_by_density(double n_antennas, double rho_h, double rho_w,
                              double alpha) {
  return mean_se_hex_by_density(n_antennas, rho_h, rho_w, alpha, hex_density_constant());
}

double mean_se_hex_insufficient(double n_antennas, double spacing, double rho_w,
                                const PowerControl& pc) {
  const double d = spacing;
  const double xmax = d / kSqrt3;
  const double rm = pc.full_power_radius();
  if (rm >= xmax) return mean_se_hex_sufficient(n_antennas, d, rho_w, pc.alpha);

  const double a = pc.alpha;
  const double ga = g_alpha(a);
  const double moment = hex_power_moment(pc, d);
  const double scale = std::pow(n_antennas / (moment * M_PI * rho_w), a / 2.0);
  const double first =
      hex_link_cdf(rm, d) *
      std::log2(1.0 + ga * pc.target_rx_power / pc.gain * scale);

  auto integrand = [&](double x) {
    return std::log2(1.0 + ga * pc.max_power * scale * std::pow(x, -a)) *
           hex_link_pdf(x, d);
  };
  // hex_link_pdf has a kink at d/2; split there when it lies in range.
  double second = 0.0;
  const double knee = d / 2.0;
  if (rm < knee) {
    second += quadrature(integrand, rm, knee, 5e-9);
    second += quadrature(integrand, knee, xmax, 5e-9);
  } else {
    second += quadrature(integrand, rm, xmax, 1e-8);
  }
  return first + second;
}

double mean_se_ppp(double n_antennas, double rho_t, double rho_w,
                   const PowerControl& pc) {
  const double a = pc.alpha;
  const double ga = g_alpha(a);
  if (!std::isfinite(pc.max_power)) {
    return std::log2(1.0 + ga * std::pow(n_antennas * rho_t / rho_w, a / 2.0));
  }
  const double moment = ppp_power_moment(pc, rho_t);
  const double scale = std::pow(n_antennas / (moment * M_PI * rho_w), a / 2.0);
  const double rm = pc.full_power_radius();
  const double first =
      -std::expm1(-M_PI * rho_t * rm * rm) *
      std::log2(1.0 + pc.target_rx_power / pc.gain * ga * scale);

  auto weight = [&](double r) {
    return 2.0 * M_PI * rho_t * r * std::exp(-M_PI * rho_t * r * r);
  };
  const double r_peak = 1.0 / std::sqrt(2.0 * M_PI * rho_t);
  const double w_peak = weight(r_peak);
  double r_hi = std::max(rm, r_peak);
  while (weight(r_hi) > 1e-12 * w_peak) r_hi *= 1.5;

  auto integrand = [&](double r) {
    return std::log2(1.0 + ga * pc.max_power * scale * std::pow(r, -a)) * weight(r);
  };
  return first + quadrature(integrand, rm, r_hi, 1e-9);
}

HexPppComparison compare_hex_ppp(double n_antennas, double rel_density,
                                 double rho_w, const PowerControl& pc) {
  const double density = rel_density * rho_w;
  HexPppComparison out;
  out.hex_se = mean_se_hex_insufficient(n_antennas, hex_spacing_for_density(density),
                                        rho_w, pc);
  out.ppp_se = mean_se_ppp(n_antennas, density, rho_w, pc);
  out.ratio = out.hex_se / out.ppp_se;
  return out;
}

}  // namespace cellrate
