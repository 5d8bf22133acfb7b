#pragma once

#include <Eigen/Core>

#include <cstddef>

#include "cellrate/geometry.hpp"
#include "cellrate/powerctl.hpp"
#include "cellrate/rng.hpp"

namespace cellrate {

// One uplink realization at the origin receiver: the representative link's
// channel, unit-variance Rayleigh fading toward every interferer, and the
// received interference powers G_t * P_i * r_i^(-alpha).
struct ChannelRealization {
  Eigen::VectorXcd rep_channel;  // N; column sqrt(p_1) g_1
  Eigen::MatrixXcd fading;       // N x n, IID CN(0,1)
  Eigen::VectorXd rx_power;      // n received interference powers [W]
  double noise = 0.0;            // sigma-bar^2 [W]
};

// Builds a realization from node positions and transmit powers; the node at
// rep_index is the representative, all others interfere. Throws
// std::invalid_argument on a node at the origin (infinite path gain) or
// non-finite inputs.
ChannelRealization generate_channel(const PointSet& node_positions,
                                    const Eigen::VectorXd& tx_powers,
                                    std::size_t rep_index, int n_antennas,
                                    const PowerControl& pc, double noise,
                                    RngStream& rng);

// Output SINR of the linear MMSE receiver: h^H (G diag(p) G^H + noise I)^-1 h,
// computed through a Cholesky solve. noise must be positive.
double mmse_sinr(const Eigen::Ref<const Eigen::VectorXcd>& rep_channel,
                 const Eigen::Ref<const Eigen::MatrixXcd>& fading,
                 const Eigen::Ref<const Eigen::VectorXd>& rx_power,
                 double noise);

double mmse_sinr(const ChannelRealization& ch);

inline double spectral_efficiency(double sinr) { return std::log2(1.0 + sinr); }

}  // namespace cellrate
