#pragma once

#include "cbmc/arm/model.hpp"
#include "cbmc/snn/network.hpp"

namespace cbmc::brainstem {

inline constexpr int kWindow = 15;
inline constexpr double kScaleP = 20.0;  // a
inline constexpr double kScaleV = 2.0;   // b

/// 28 inputs -> 10 LIF -> 14 non-spiking (u_reset = 10).
snn::Topology topology();

struct GainLimits {
  double kp_min = 0.0;
  double kp_max = 500.0;
  double kv_min = 5.0;
  double kv_max = 50.0;
};

/// Diagonals of K_P and K_V.
struct Gains {
  JointVectord kp = JointVectord::Zero();
  JointVectord kv = JointVectord::Zero();
};

struct BrainstemNet {
  snn::SpikingNetworkd network;
  snn::WindowTape<double> tape;  // from the latest compute_gains call
  Eigen::VectorXd potentials;    // raw output potentials of that call

  static BrainstemNet create(std::uint64_t seed);
};

/// [q_d, qd_d, q, qd] with positions normalized to [-1, 1] by the joint limits
/// and velocities divided by the velocity limits.
Eigen::VectorXd encode_state(const arm::ArmModel& model, const JointVectord& q_d, const JointVectord& qd_d,
                             const JointVectord& q, const JointVectord& qd);

/// Runs the T = 15 window and scales the output potentials into clamped gains.
Gains compute_gains(BrainstemNet& net, const arm::ArmModel& model, const JointVectord& q_d,
                    const JointVectord& qd_d, const JointVectord& q, const JointVectord& qd,
                    const GainLimits& limits = {});

/// Gains from raw output potentials (scaling and clamping only).
Gains scale_gains(const Eigen::VectorXd& potentials, const GainLimits& limits = {});

struct LossTerms {
  double value = 0.0;
  JointVectord d_kp = JointVectord::Zero();
  JointVectord d_kv = JointVectord::Zero();
};

/// sum 100 e_q + sum 1e-4 e_qd + sum 1e-3 tau^2, with gain gradients from the
/// latest spinal spike sums: the error terms credit each gain through the sign
/// of the spikes it multiplies, the torque term is differentiated exactly
/// through the tau_mb = 2 spinal increment.
LossTerms brainstem_loss(const JointVectord& q_d, const JointVectord& q, const JointVectord& qd_d,
                         const JointVectord& qd, const JointVectord& tau, const JointVectord& spikes_q,
                         const JointVectord& spikes_qd);

/// One SGD-momentum step (lr 0.01, momentum 0.5) through the latest window.
/// Gains sitting on a clamp pass no gradient.
void online_update(BrainstemNet& net, const LossTerms& loss, const GainLimits& limits = {},
                   const snn::SgdMomentum& opt = {0.01, 0.5, 0.0});

}  // namespace cbmc::brainstem
