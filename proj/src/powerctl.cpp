#include "cellrate/powerctl.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "cellrate/geometry.hpp"

namespace cellrate {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double transmit_power(double link_length, const PowerControl& pc) {
  const double wanted =
      pc.target_rx_power / pc.gain * std::pow(link_length, pc.alpha);
  return std::min(wanted, pc.max_power);
}

double hex_power_moment(const PowerControl& pc, double spacing) {
  const double d = spacing;
  const double a = pc.alpha;
  const double ptgt = pc.target_rx_power / pc.gain;
  const double rm = pc.full_power_radius();
  const double xmax = d / kSqrt3;
  if (rm >= xmax) {
    // sufficient power: E[P^(2/a)] = (p_t/G_t)^(2/a) E[x^2], E[x^2] = 5/36 d^2
    return std::pow(ptgt, 2.0 / a) * (5.0 / 36.0) * d * d;
  }
  const double pm2 = std::pow(pc.max_power, 2.0 / a);
  const double pm4 = std::pow(pc.max_power, 4.0 / a);
  const double inv2 = std::pow(1.0 / ptgt, 2.0 / a);  // (G_t/p_t)^(2/a)
  if (rm < d / 2.0) {
    return pm2 - kSqrt3 * M_PI / (3.0 * d * d) * inv2 * pm4;
  }
  const double acos_term = std::acos(d / (2.0 * rm));
  const double root = std::sqrt(4.0 * rm * rm - d * d);
  return pm2 - M_PI * kSqrt3 / (3.0 * d * d) * inv2 * pm4 +
         2.0 * kSqrt3 / (d * d) * inv2 * pm4 * acos_term +
         (kSqrt3 * d / 12.0 * std::pow(ptgt, 2.0 / a) -
          5.0 * kSqrt3 / (6.0 * d) * pm2) *
             root;
}

double ppp_power_moment(const PowerControl& pc, double intensity) {
  const double a = pc.alpha;
  const double scale = std::pow(pc.target_rx_power / pc.gain, 2.0 / a);
  if (!std::isfinite(pc.max_power)) return scale / (M_PI * intensity);
  const double s =
      M_PI * intensity *
      std::pow(pc.gain / pc.target_rx_power * pc.max_power, 2.0 / a);
  return scale * (-std::expm1(-s)) / (M_PI * intensity);
}

PowerDistribution PowerDistribution::hex_cells(const PowerControl& pc, double spacing) {
  if (!(spacing > 0.0))
    throw std::invalid_argument("PowerDistribution: spacing must be positive");
  return PowerDistribution(Model::Hex, pc, spacing);
}

PowerDistribution PowerDistribution::ppp_cells(const PowerControl& pc, double intensity) {
  if (!(intensity > 0.0))
    throw std::invalid_argument("PowerDistribution: intensity must be positive");
  return PowerDistribution(Model::Ppp, pc, intensity);
}

PowerDistribution PowerDistribution::point_mass(double power, double alpha) {
  PowerControl pc;
  pc.target_rx_power = 1.0;
  pc.gain = 1.0;
  pc.max_power = power;
  pc.alpha = alpha;
  return PowerDistribution(Model::Point, pc, power);
}

double PowerDistribution::moment() const {
  switch (model_) {
    case Model::Hex:
      return hex_power_moment(pc_, param_);
    case Model::Ppp:
      return ppp_power_moment(pc_, param_);
    case Model::Point:
      return std::pow(param_, 2.0 / pc_.alpha);
  }
  return 0.0;
}

double PowerDistribution::truncated_moment(double t) const {
  const double a = pc_.alpha;
  if (t <= 0.0) return moment();
  if (model_ == Model::Point)
    return t <= param_ ? std::pow(param_, 2.0 / a) : 0.0;

  const double ptgt = pc_.target_rx_power / pc_.gain;
  const double rm = pc_.full_power_radius();
  if (std::isfinite(pc_.max_power) && t > pc_.max_power) return 0.0;
  const double xt = std::pow(t / ptgt, 1.0 / a);  // link length where P = t

  if (model_ == Model::Hex) {
    const double d = param_;
    const double xmax = d / kSqrt3;
    const double cut = std::min(rm, xmax);
    double total = 0.0;
    if (xt < cut) {
      total += std::pow(ptgt, 2.0 / a) *
               (hex_link_partial_second_moment(cut, d) -
                hex_link_partial_second_moment(xt, d));
    }
    if (rm < xmax) total += std::pow(pc_.max_power, 2.0 / a) * (1.0 - hex_link_cdf(rm, d));
    return total;
  }

  // PPP: int_a^b 2 pi rho r^3 e^{-pi rho r^2} dr =
  //      (a^2 + 1/(pi rho)) e^{-pi rho a^2} - (b^2 + 1/(pi rho)) e^{-pi rho b^2}
  const double rho = param_;
  const double c = 1.0 / (M_PI * rho);
  auto upper_partial = [&](double r) {
    if (!std::isfinite(r)) return 0.0;
    return (r * r + c) * std::exp(-M_PI * rho * r * r);
  };
  double total = 0.0;
  const double cut = rm;  // +inf when uncapped
  if (xt < cut) {
    total += std::pow(ptgt, 2.0 / a) * (upper_partial(xt) - upper_partial(cut));
  }
  if (std::isfinite(rm))
    total += std::pow(pc_.max_power, 2.0 / a) * std::exp(-M_PI * rho * rm * rm);
  return total;
}

double PowerDistribution::cdf(double p) const {
  if (model_ == Model::Point) return p >= param_ ? 1.0 : 0.0;
  if (p < 0.0) return 0.0;
  if (std::isfinite(pc_.max_power) && p >= pc_.max_power) return 1.0;
  const double ptgt = pc_.target_rx_power / pc_.gain;
  const double x = std::pow(p / ptgt, 1.0 / pc_.alpha);
  return model_ == Model::Hex ? hex_link_cdf(x, param_) : ppp_link_cdf(x, param_);
}

double PowerDistribution::pdf(double p) const {
  if (model_ == Model::Point) return 0.0;
  if (p <= 0.0) return 0.0;
  if (std::isfinite(pc_.max_power) && p >= pc_.max_power) return 0.0;
  const double a = pc_.alpha;
  const double ptgt = pc_.target_rx_power / pc_.gain;
  const double x = std::pow(p / ptgt, 1.0 / a);
  const double dxdp = std::pow(1.0 / ptgt, 1.0 / a) * std::pow(p, 1.0 / a - 1.0) / a;
  const double fx = model_ == Model::Hex ? hex_link_pdf(x, param_) : ppp_link_pdf(x, param_);
  return fx * dxdp;
}

double PowerDistribution::sample(RngStream& rng) const {
  switch (model_) {
    case Model::Hex:
      return transmit_power(sample_hex_link(param_, rng), pc_);
    case Model::Ppp:
      return transmit_power(sample_ppp_link(param_, rng), pc_);
    case Model::Point:
      return param_;
  }
  return 0.0;
}

double PowerDistribution::support_max() const {
  switch (model_) {
    case Model::Point:
      return param_;
    case Model::Hex: {
      const double xmax = param_ / kSqrt3;
      const double uncapped =
          pc_.target_rx_power / pc_.gain * std::pow(xmax, pc_.alpha);
      return std::min(uncapped, pc_.max_power);
    }
    case Model::Ppp:
      return pc_.max_power;  // +inf when uncapped
  }
  return 0.0;
}

double PowerDistribution::support_cut() const {
  const double sup = support_max();
  if (std::isfinite(sup)) return sup;
  // Rayleigh-tail cut: beyond x with pi*rho*x^2 = 45 the remaining moment
  // mass is ~e^-45 of scale.
  const double x = std::sqrt(45.0 / (M_PI * param_));
  return pc_.target_rx_power / pc_.gain * std::pow(x, pc_.alpha);
}

}  // namespace cellrate
