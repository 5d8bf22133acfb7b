#pragma once

#include <cmath>

#include "cellrate/rng.hpp"

namespace cellrate {

// Distance-based uplink power control: a node at link length r transmits
// min(p_t/G_t * r^alpha, P_M) so that p_t arrives at its base station.
struct PowerControl {
  double target_rx_power = 0.0;  // p_t  [W]
  double gain = 0.0;             // G_t  [m^alpha]
  double max_power = 0.0;        // P_M  [W]; +inf means unconstrained
  double alpha = 4.0;            // path-loss exponent, > 2

  // Link length beyond which the cap binds (full-power radius); +inf when
  // max_power is unbounded.
  double full_power_radius() const {
    return std::pow(gain * max_power / target_rx_power, 1.0 / alpha);
  }
};

double transmit_power(double link_length, const PowerControl& pc);

// Transmit-power law induced by a cell model under PowerControl: a continuous
// part (the push-forward of the link-length law) plus an atom at max_power
// when links can exceed the full-power radius. The point-mass variant models
// constant transmit power.
class PowerDistribution {
 public:
  static PowerDistribution hex_cells(const PowerControl& pc, double spacing);
  static PowerDistribution ppp_cells(const PowerControl& pc, double intensity);
  static PowerDistribution point_mass(double power, double alpha);

  double alpha() const { return pc_.alpha; }
  const PowerControl& control() const { return pc_; }

  // E[P^(2/alpha)]
  double moment() const;

  // int_t^inf f_P(x) x^(2/alpha) dx, the atom at P_M included while t <= P_M.
  double truncated_moment(double t) const;

  // Right-continuous CDF; steps to 1 at max_power.
  double cdf(double p) const;

  // Density of the continuous part (0 at the atom and off support).
  double pdf(double p) const;

  // Link-length sampling composed with the power-control law.
  double sample(RngStream& rng) const;

  // Supremum of the power support; +inf for ppp cells without a cap.
  double support_max() const;

  // Finite power cut above which the remaining truncated moment is
  // negligible (< ~1e-19 of scale); equals support_max when finite.
  double support_cut() const;

 private:
  enum class Model { Hex, Ppp, Point };
  PowerDistribution(Model m, const PowerControl& pc, double param)
      : model_(m), pc_(pc), param_(param) {}

  Model model_;
  PowerControl pc_;
  double param_;  // spacing | intensity | power
};

// E[P^(2/alpha)] for hexagonal cells (three branches in the full-power
// radius) and for PPP cells (closed form; the no-cap limit when P_M = inf).
double hex_power_moment(const PowerControl& pc, double spacing);
double ppp_power_moment(const PowerControl& pc, double intensity);

}  // namespace cellrate
