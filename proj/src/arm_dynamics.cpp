#include "cbmc/arm/dynamics.hpp"

namespace cbmc::arm {

std::array<LinkInertial, kJoints> effective_links(const ArmModel& model, const LoadSpec& load) {
  std::array<LinkInertial, kJoints> out;
  for (int i = 0; i < kJoints; ++i) out[i] = {model.links[i].mass, model.links[i].com, model.links[i].inertia};
  if (load.mass <= 0.0) return out;

  // Parallel-axis combination of the last link with the point load.
  LinkInertial& last = out.back();
  const Eigen::Vector3d r = model.flange * load.offset;
  const double total = last.mass + load.mass;
  const Eigen::Vector3d c = (last.mass * last.com + load.mass * r) / total;
  auto shift = [](const Eigen::Vector3d& d) {
    return Eigen::Matrix3d(d.squaredNorm() * Eigen::Matrix3d::Identity() - d * d.transpose());
  };
  last.inertia = last.inertia + last.mass * shift(last.com - c) + load.mass * shift(r - c);
  last.com = c;
  last.mass = total;
  return out;
}

double kinetic_energy(const ArmModel& model, const JointState& state, const LoadSpec& load) {
  return 0.5 * state.qd.dot(mass_matrix(model, state.q, load) * state.qd);
}

Eigen::Vector3d flange_point_acceleration(const ArmModel& model, const JointVectord& q, const JointVectord& qd,
                                          const JointVectord& qdd, const Eigen::Vector3d& offset) {
  const auto m = detail::forward_pass<double>(model, q, qd, qdd, Eigen::Vector3d::Zero());
  const int last = kJoints - 1;
  const Eigen::Vector3d r = model.flange * offset;
  const Eigen::Vector3d a_local =
      m.accel[last] + m.alpha[last].cross(r) + m.omega[last].cross(m.omega[last].cross(r));
  const auto poses = chain_poses(model, q);
  return poses.links[last].rotation * a_local;
}

StepResult forward_dynamics_step(const ArmModel& model, const JointState& state, const JointVectord& tau,
                                 const LoadSpec& load, double dt) {
  if (!(dt > 0)) throw Error("forward_dynamics_step: dt must be positive");
  if (!tau.allFinite()) throw Error("forward_dynamics_step: non-finite torque");
  StepResult out;
  const JointVectord limit = model.effort_limits();
  out.applied_torque = tau.cwiseMax(-limit).cwiseMin(limit);

  const JointVectord bias = inverse_dynamics(model, state.q, state.qd, JointVectord::Zero(), load);
  const JointMatrixd M = mass_matrix(model, state.q, load);
  Eigen::LLT<JointMatrixd> llt(M);
  if (llt.info() != Eigen::Success) throw Error("forward_dynamics_step: mass matrix is not positive definite");
  out.qdd = llt.solve(out.applied_torque - bias);

  out.state.qd = state.qd + out.qdd * dt;
  out.state.q = state.q + out.state.qd * dt;
  const JointVectord lo = model.lower_limits(), hi = model.upper_limits();
  for (int i = 0; i < kJoints; ++i) {
    if (out.state.q[i] < lo[i]) {
      out.state.q[i] = lo[i];
      out.state.qd[i] = 0.0;
    } else if (out.state.q[i] > hi[i]) {
      out.state.q[i] = hi[i];
      out.state.qd[i] = 0.0;
    }
  }
  if (!out.state.q.allFinite() || !out.state.qd.allFinite())
    throw Error("forward_dynamics_step: non-finite state");
  return out;
}

Wrench end_effector_wrench(const ArmModel& model, const JointState& state, const JointVectord& qdd,
                           const LoadSpec& load, WrenchMode mode) {
  Wrench w;
  if (load.mass <= 0.0) return w;
  Eigen::Vector3d specific = model.gravity;
  if (mode == WrenchMode::full) specific -= flange_point_acceleration(model, state.q, state.qd, qdd, load.offset);
  const auto flange = forward_kinematics(model, state.q);
  w.force = flange.rotation.transpose() * (load.mass * specific);
  w.torque = load.offset.cross(w.force);
  return w;
}

Wrench add_sensor_noise(const Wrench& w, const SensorNoise& noise, std::mt19937_64& rng) {
  Wrench out = w;
  std::normal_distribution<double> nf(0.0, noise.force_sigma), nt(0.0, noise.torque_sigma);
  if (noise.force_sigma > 0)
    for (int i = 0; i < 3; ++i) out.force[i] += nf(rng);
  if (noise.torque_sigma > 0)
    for (int i = 0; i < 3; ++i) out.torque[i] += nt(rng);
  return out;
}

}  // namespace cbmc::arm
