#include "cbmc/spinal.hpp"

namespace cbmc::spinal {

void EncodingParams::validate() const {
  if (k < 2 || k % 2 != 0) throw Error("EncodingParams: k must be even and >= 2");
  if (!(delta_q > 0.0) || !(delta_qd > 0.0)) throw Error("EncodingParams: error scales must be positive");
}

JointVectord spinal_step(SpinalState& state, std::uint64_t tick, const JointVectord& q_d, const JointVectord& qd_d,
                         const JointVectord& q, const JointVectord& qd, const JointVectord& kp,
                         const JointVectord& kv, const JointVectord& tau_g, const JointVectord& effort_limits,
                         const EncodingParams& params) {
  for (int i = 0; i < kJoints; ++i) {
    const CounterStream pos(state.seed, i, tick, 0), vel(state.seed, i, tick, 1);
    state.spikes_q[i] = poisson_encode(q_d[i] - q[i], params.delta_q, params.k, pos);
    state.spikes_qd[i] = poisson_encode(qd_d[i] - qd[i], params.delta_qd, params.k, vel);
  }
  const JointVectord delta =
      tau_g + kp.cwiseProduct(state.spikes_q) + kv.cwiseProduct(state.spikes_qd);
  if (!delta.allFinite()) throw Error("spinal_step: non-finite increment at tick " + std::to_string(tick));
  state.u_sp += (delta - state.u_sp) / kTauSpinal;
  return state.u_sp.cwiseMax(-effort_limits).cwiseMin(effort_limits);
}

}  // namespace cbmc::spinal
