#include "cbmc/brainstem.hpp"

#include "cbmc/spinal.hpp"

namespace cbmc::brainstem {

snn::Topology topology() {
  snn::Topology t;
  t.input_size = 4 * kJoints;
  t.layers = {
      {10, snn::LifParams::spiking(5.0, 0.0, 0.005), false},
      {2 * kJoints, snn::LifParams::non_spiking(5.0, 10.0), false},
  };
  return t;
}

BrainstemNet BrainstemNet::create(std::uint64_t seed) {
  BrainstemNet net;
  net.network = snn::SpikingNetworkd(topology(), snn::SurrogateConfig{5.0});
  net.network.initialize(seed);
  return net;
}

Eigen::VectorXd encode_state(const arm::ArmModel& model, const JointVectord& q_d, const JointVectord& qd_d,
                             const JointVectord& q, const JointVectord& qd) {
  const JointVectord lo = model.lower_limits(), hi = model.upper_limits(), v = model.velocity_limits();
  const JointVectord mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  Eigen::VectorXd x(4 * kJoints);
  x << (q_d - mid).cwiseQuotient(half), qd_d.cwiseQuotient(v), (q - mid).cwiseQuotient(half), qd.cwiseQuotient(v);
  if (!x.allFinite()) throw Error("brainstem: non-finite state input");
  return x;
}

Gains scale_gains(const Eigen::VectorXd& u, const GainLimits& limits) {
  if (u.size() != 2 * kJoints) throw Error("scale_gains: expected 14 potentials");
  Gains g;
  g.kp = (kScaleP * u.head<kJoints>()).cwiseMax(limits.kp_min).cwiseMin(limits.kp_max);
  g.kv = (kScaleV * u.tail<kJoints>()).cwiseMax(limits.kv_min).cwiseMin(limits.kv_max);
  return g;
}

Gains compute_gains(BrainstemNet& net, const arm::ArmModel& model, const JointVectord& q_d,
                    const JointVectord& qd_d, const JointVectord& q, const JointVectord& qd,
                    const GainLimits& limits) {
  const Eigen::MatrixXd x = encode_state(model, q_d, qd_d, q, qd);
  net.potentials = net.network.run_window(x, kWindow, &net.tape);
  return scale_gains(net.potentials, limits);
}

LossTerms brainstem_loss(const JointVectord& q_d, const JointVectord& q, const JointVectord& qd_d,
                         const JointVectord& qd, const JointVectord& tau, const JointVectord& spikes_q,
                         const JointVectord& spikes_qd) {
  const JointVectord e = q_d - q, ed = qd_d - qd;
  LossTerms out;
  out.value = 100.0 * e.sum() + 1e-4 * ed.sum() + 1e-3 * tau.squaredNorm();
  const JointVectord torque_grad = 2e-3 * tau / spinal::kTauSpinal;
  out.d_kp = -100.0 * e.cwiseProduct(spikes_q.cwiseSign()) + torque_grad.cwiseProduct(spikes_q);
  out.d_kv = -1e-4 * ed.cwiseProduct(spikes_qd.cwiseSign()) + torque_grad.cwiseProduct(spikes_qd);
  return out;
}

void online_update(BrainstemNet& net, const LossTerms& loss, const GainLimits& limits,
                   const snn::SgdMomentum& opt) {
  if (!net.tape.complete()) throw Error("brainstem online_update: no forward window recorded");
  if (!loss.d_kp.allFinite() || !loss.d_kv.allFinite())
    throw Error("brainstem online_update: non-finite gain gradient");
  Eigen::MatrixXd du(2 * kJoints, 1);
  for (int i = 0; i < kJoints; ++i) {
    const double kp = kScaleP * net.potentials[i];
    const double kv = kScaleV * net.potentials[kJoints + i];
    du(i, 0) = (kp > limits.kp_min && kp < limits.kp_max) ? kScaleP * loss.d_kp[i] : 0.0;
    du(kJoints + i, 0) = (kv > limits.kv_min && kv < limits.kv_max) ? kScaleV * loss.d_kv[i] : 0.0;
  }
  snn::sgd_momentum_update(net.network, net.network.backprop_window(net.tape, du), opt);
}

}  // namespace cbmc::brainstem
