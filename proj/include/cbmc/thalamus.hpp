#pragma once

#include "cbmc/arm/dynamics.hpp"
#include "cbmc/snn/network.hpp"

namespace cbmc::thalamus {

inline constexpr int kWindow = 10;
inline constexpr double kForceScale = 50.0;  // N
inline constexpr double kTorqueScale = 5.0;  // N*m
inline constexpr double kTauFilter = 5.0;

/// 6 wrench inputs -> 5 LIF -> 2 non-spiking (u_reset = 10), softmax head.
snn::Topology topology();

struct ThalamusNet {
  snn::SpikingNetworkd network;
  snn::WindowTape<double> tape;  // from the latest sense_weights call
  Eigen::Vector2d weights = Eigen::Vector2d::Constant(0.5);

  static ThalamusNet create(std::uint64_t seed);
};

Eigen::Vector2d softmax(const Eigen::Vector2d& z);

/// Runs the T = 10 window on the normalized wrench; returns (w_light, w_heavy).
Eigen::Vector2d sense_weights(ThalamusNet& net, const arm::Wrench& wrench);

/// w1 * light column + w2 * heavy column.
JointVectord combine(const CompensationMatrixd& T_cb, const Eigen::Vector2d& w);

/// Seven non-spiking neurons with tau_mb = 5 and u_reset = 0, persistent
/// across invocations. Their potentials are tau_g.
struct FilterState {
  JointVectord u_ft = JointVectord::Zero();
};

JointVectord filter_step(FilterState& state, const JointVectord& delta);

struct UpdateInfo {
  double loss = 0.0;
  Eigen::Vector2d d_weights = Eigen::Vector2d::Zero();
};

/// One SGD step (lr 0.01, momentum 0.5, weight decay 0.001) through the
/// latest window. The plant is treated as a unit Jacobian, so
/// dLoss/dtau_g = -(100 e_q + 1e-4 e_qd); the chain then runs through the
/// filter's 1/tau_mb, the two pattern columns and the softmax.
UpdateInfo online_update(ThalamusNet& net, const CompensationMatrixd& T_cb, const JointVectord& q_d,
                         const JointVectord& q, const JointVectord& qd_d, const JointVectord& qd,
                         const snn::SgdMomentum& opt = {0.01, 0.5, 0.001});

}  // namespace cbmc::thalamus
