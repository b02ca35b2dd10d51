#include "cbmc/thalamus.hpp"

#include <cmath>

namespace cbmc::thalamus {

snn::Topology topology() {
  snn::Topology t;
  t.input_size = 6;
  t.layers = {
      {5, snn::LifParams::spiking(5.0, 0.0, 0.01), false},
      {2, snn::LifParams::non_spiking(5.0, 10.0), false},
  };
  return t;
}

ThalamusNet ThalamusNet::create(std::uint64_t seed) {
  ThalamusNet net;
  net.network = snn::SpikingNetworkd(topology(), snn::SurrogateConfig{5.0});
  net.network.initialize(seed);
  return net;
}

Eigen::Vector2d softmax(const Eigen::Vector2d& z) {
  const Eigen::Vector2d e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::Vector2d sense_weights(ThalamusNet& net, const arm::Wrench& wrench) {
  if (!wrench.stacked().allFinite()) throw Error("sense_weights: non-finite wrench");
  Eigen::MatrixXd x(6, 1);
  x << wrench.force / kForceScale, wrench.torque / kTorqueScale;
  const Eigen::VectorXd z = net.network.run_window(x, kWindow, &net.tape);
  net.weights = softmax(z.head<2>());
  return net.weights;
}

JointVectord combine(const CompensationMatrixd& T_cb, const Eigen::Vector2d& w) { return T_cb * w; }

JointVectord filter_step(FilterState& state, const JointVectord& delta) {
  if (!delta.allFinite()) throw Error("filter_step: non-finite input");
  state.u_ft += (delta - state.u_ft) / kTauFilter;
  return state.u_ft;
}

UpdateInfo online_update(ThalamusNet& net, const CompensationMatrixd& T_cb, const JointVectord& q_d,
                         const JointVectord& q, const JointVectord& qd_d, const JointVectord& qd,
                         const snn::SgdMomentum& opt) {
  if (!net.tape.complete()) throw Error("thalamus online_update: no forward window recorded");
  const JointVectord e = q_d - q, ed = qd_d - qd;
  UpdateInfo info;
  info.loss = 100.0 * e.sum() + 1e-4 * ed.sum();
  if (!std::isfinite(info.loss)) throw Error("thalamus online_update: non-finite loss");
  const JointVectord d_tau = -(100.0 * e + 1e-4 * ed);
  info.d_weights = T_cb.transpose() * (d_tau / kTauFilter);
  const Eigen::Vector2d& w = net.weights;
  const Eigen::Matrix2d jac = Eigen::Matrix2d(w.asDiagonal()) - w * w.transpose();
  const Eigen::MatrixXd dz = jac * info.d_weights;
  snn::sgd_momentum_update(net.network, net.network.backprop_window(net.tape, dz), opt);
  return info;
}

}  // namespace cbmc::thalamus
