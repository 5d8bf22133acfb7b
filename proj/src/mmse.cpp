#include "cellrate/mmse.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace cellrate {

ChannelRealization generate_channel(const PointSet& node_positions,
                                    const Eigen::VectorXd& tx_powers,
                                    std::size_t rep_index, int n_antennas,
                                    const PowerControl& pc, double noise,
                                    RngStream& rng) {
  const std::size_t total = node_positions.size();
  if (rep_index >= total)
    throw std::invalid_argument("generate_channel: rep_index out of range");
  if (static_cast<std::size_t>(tx_powers.size()) != total)
    throw std::invalid_argument("generate_channel: power/position size mismatch");
  if (n_antennas < 1)
    throw std::invalid_argument("generate_channel: need at least one antenna");
  if (!(noise > 0.0))
    throw std::invalid_argument("generate_channel: noise must be positive");

  ChannelRealization ch;
  ch.noise = noise;
  const Eigen::Index n = static_cast<Eigen::Index>(total) - 1;
  ch.rx_power.resize(n);
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < total; ++i) {
    const double r = node_positions[i].norm();
    if (r <= 0.0)
      throw std::invalid_argument("generate_channel: node at the origin");
    const double p = pc.gain * tx_powers[static_cast<Eigen::Index>(i)] *
                     std::pow(r, -pc.alpha);
    if (!std::isfinite(p))
      throw std::invalid_argument("generate_channel: non-finite received power");
    if (i != rep_index) {
      ch.rx_power[k++] = p;
    } else {
      ch.rep_channel.resize(n_antennas);
      const double amp = std::sqrt(p);
      for (int a = 0; a < n_antennas; ++a) ch.rep_channel[a] = amp * rng.next_cgauss();
    }
  }
  ch.fading.resize(n_antennas, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (int a = 0; a < n_antennas; ++a) ch.fading(a, j) = rng.next_cgauss();
  return ch;
}

double mmse_sinr(const Eigen::Ref<const Eigen::VectorXcd>& rep_channel,
                 const Eigen::Ref<const Eigen::MatrixXcd>& fading,
                 const Eigen::Ref<const Eigen::VectorXd>& rx_power,
                 double noise) {
  const Eigen::Index n_ant = rep_channel.size();
  if (n_ant < 1) throw std::invalid_argument("mmse_sinr: empty channel");
  if (fading.rows() != n_ant || fading.cols() != rx_power.size())
    throw std::invalid_argument("mmse_sinr: shape mismatch");
  if (!(noise > 0.0)) throw std::invalid_argument("mmse_sinr: noise must be positive");
  if (!rep_channel.allFinite() || !fading.allFinite() || !rx_power.allFinite())
    throw std::invalid_argument("mmse_sinr: non-finite input");

  Eigen::MatrixXcd cov = noise * Eigen::MatrixXcd::Identity(n_ant, n_ant);
  if (rx_power.size() > 0) {
    // O(N^2 n) rank accumulation of sum p_i g_i g_i^H via a scaled copy.
    const Eigen::MatrixXcd scaled =
        fading * rx_power.cwiseSqrt().asDiagonal();
    cov.selfadjointView<Eigen::Lower>().rankUpdate(scaled, 1.0);
  }
  const Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("mmse_sinr: covariance not positive definite");
  return rep_channel.dot(llt.solve(rep_channel)).real();
}

double mmse_sinr(const ChannelRealization& ch) {
  return mmse_sinr(ch.rep_channel, ch.fading, ch.rx_power, ch.noise);
}

}  // namespace cellrate
