#pragma once

#include <cmath>

#include "cellrate/powerctl.hpp"

namespace cellrate {

// G_alpha = [(alpha/2pi) sin(2pi/alpha)]^(alpha/2); alpha > 2.
double g_alpha(double alpha);

// Exact constant of the density form of the hex mean-SE expression,
// 18*sqrt(3)/(5*pi) = 1.9848. The rounded 1.95 matches published tables.
double hex_density_constant();
inline constexpr double kHexDensityConstantRounded = 1.95;

// Inputs of the normalized-SINR fixed point. b = (pi*rho_w/c)^(alpha/2) is
// derived on demand, never stored.
struct AsymptoticParams {
  double alpha = 4.0;    // path-loss exponent
  double rho_w = 1e-3;   // wireless-node density [m^-2]
  double c = 1e3;        // interferers per antenna, n/N
  double sigma2 = 0.0;   // normalized noise constant [W]
  double gain = 1e-5;    // G_t [m^alpha]
  double r1 = 30.0;      // representative link length [m]
  double p1 = 1.0;       // representative transmit power [W]
  PowerDistribution dist;

  double b() const { return std::pow(M_PI * rho_w / c, alpha / 2.0); }
};

// LHS - RHS of the fixed-point equation at the given beta. The inner
// truncated power moment is analytic per model; only the outer integral is
// numeric, with the tau^(-2/alpha) endpoint singularity removed by the
// tau = u^(alpha/(alpha-2)) substitution.
double fixed_point_residual(const AsymptoticParams& params, double beta);

// Unique non-negative root of the fixed-point equation (normalized SINR
// limit). Brackets [0, beta_hi] by doubling the closed-form seed until the
// sign changes, then runs Brent. Throws NumericError after 64 doublings.
double solve_fixed_point(const AsymptoticParams& params);

// Large-N SINR approximation P1 * G_alpha * (N/(E[P^(2/a)] pi rho_w r1^2))^(a/2).
double sinr_approx(double n_antennas, double r1, double p1,
                   const PowerDistribution& dist, double rho_w, double alpha);

// Mean SE for hexagonal cells when every node reaches the target power:
// log2(1 + G_a (N / (5/36 d^2 pi rho_w))^(a/2)).
double mean_se_hex_sufficient(double n_antennas, double spacing, double rho_w,
                              double alpha);

// Same quantity in terms of the site density rho_h; with the default exact
// constant it coincides with mean_se_hex_sufficient at rho_h = 2/(sqrt(3) d^2).
double mean_se_hex_by_density(double n_antennas, double rho_h, double rho_w,
                              double alpha, double density_constant);
double mean_se_hex_by_density(double n_antennas, double rho_h, double rho_w,
                              double alpha);

// Mean SE for hexagonal cells under a binding power cap: closed-form term for
// links inside the full-power radius plus numeric integration of the capped
// tail against the hex link law. Delegates to the sufficient branch when the
// cap never binds.
double mean_se_hex_insufficient(double n_antennas, double spacing, double rho_w,
                                const PowerControl& pc);

// Mean SE for Poisson cells; exact closed form when max_power is infinite,
// otherwise closed-form head plus numeric Rayleigh-weighted tail.
double mean_se_ppp(double n_antennas, double rho_t, double rho_w,
                   const PowerControl& pc);

struct HexPppComparison {
  double hex_se = 0.0;   // b/s/Hz
  double ppp_se = 0.0;   // b/s/Hz
  double ratio = 0.0;    // hex/ppp
};

// Evaluates both cell models at matched effective densities
// rho_h = rho_t = rel_density * rho_w.
HexPppComparison compare_hex_ppp(double n_antennas, double rel_density,
                                 double rho_w, const PowerControl& pc);

}  // namespace cellrate
