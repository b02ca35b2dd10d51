#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <array>
#include <random>

#include "cbmc/arm/model.hpp"

namespace cbmc::arm {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar = double>
struct Pose {
  Vector3<Scalar> position = Vector3<Scalar>::Zero();
  Matrix3<Scalar> rotation = Matrix3<Scalar>::Identity();
};

struct JointState {
  JointVectord q = JointVectord::Zero();
  JointVectord qd = JointVectord::Zero();
};

/// Force and torque the load exerts on the flange, in the flange frame.
struct Wrench {
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 6, 1> stacked() const {
    Eigen::Matrix<double, 6, 1> w;
    w << force, torque;
    return w;
  }
};

/// Mass, COM and COM inertia of one link, in its own frame.
struct LinkInertial {
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
};

/// Link inertials with the point-mass load folded into the last link.
std::array<LinkInertial, kJoints> effective_links(const ArmModel& model, const LoadSpec& load);

namespace detail {

template <typename Scalar>
Matrix3<Scalar> skew(const Vector3<Scalar>& v) {
  Matrix3<Scalar> m;
  m << Scalar(0), -v.z(), v.y(), v.z(), Scalar(0), -v.x(), -v.y(), v.x(), Scalar(0);
  return m;
}

/// Rotation of link i relative to its parent at joint angle q.
template <typename Scalar>
Matrix3<Scalar> joint_rotation(const JointSpec& j, const Scalar& q) {
  const Matrix3<Scalar> fixed = j.origin_rotation().template cast<Scalar>();
  return fixed * Eigen::AngleAxis<Scalar>(q, j.axis.template cast<Scalar>()).toRotationMatrix();
}

template <typename Scalar>
struct LinkMotion {
  std::array<Matrix3<Scalar>, kJoints> rotation;  // parent <- link
  std::array<Vector3<Scalar>, kJoints> omega;     // link frame
  std::array<Vector3<Scalar>, kJoints> alpha;     // link frame
  std::array<Vector3<Scalar>, kJoints> accel;     // origin linear acceleration, link frame
};

/// Outward Newton-Euler pass. The base accelerates with `base_accel`
/// (pass -gravity to fold gravity into the recursion).
template <typename Scalar, typename DQ, typename DQd, typename DQdd>
LinkMotion<Scalar> forward_pass(const ArmModel& model, const Eigen::MatrixBase<DQ>& q,
                                const Eigen::MatrixBase<DQd>& qd, const Eigen::MatrixBase<DQdd>& qdd,
                                const Vector3<Scalar>& base_accel) {
  LinkMotion<Scalar> m;
  Vector3<Scalar> w_prev = Vector3<Scalar>::Zero();
  Vector3<Scalar> a_ang_prev = Vector3<Scalar>::Zero();
  Vector3<Scalar> a_lin_prev = base_accel;
  for (int i = 0; i < kJoints; ++i) {
    const JointSpec& j = model.joints[i];
    const Vector3<Scalar> z = j.axis.template cast<Scalar>();
    const Vector3<Scalar> p = j.origin_xyz.template cast<Scalar>();
    const Matrix3<Scalar> R = joint_rotation<Scalar>(j, q[i]);
    const Matrix3<Scalar> Rt = R.transpose();
    const Vector3<Scalar> w_in = Rt * w_prev;
    m.rotation[i] = R;
    m.omega[i] = w_in + z * qd[i];
    m.alpha[i] = Rt * a_ang_prev + w_in.cross(z * qd[i]) + z * qdd[i];
    m.accel[i] = Rt * (a_lin_prev + a_ang_prev.cross(p) + w_prev.cross(w_prev.cross(p)));
    w_prev = m.omega[i];
    a_ang_prev = m.alpha[i];
    a_lin_prev = m.accel[i];
  }
  return m;
}

}  // namespace detail

/// World poses of every link frame and of the flange.
template <typename Scalar>
struct ChainPoses {
  std::array<Pose<Scalar>, kJoints> links;
  Pose<Scalar> flange;
};

template <typename Derived>
ChainPoses<typename Derived::Scalar> chain_poses(const ArmModel& model, const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  ChainPoses<Scalar> out;
  Matrix3<Scalar> R = Matrix3<Scalar>::Identity();
  Vector3<Scalar> p = Vector3<Scalar>::Zero();
  for (int i = 0; i < kJoints; ++i) {
    p = p + R * model.joints[i].origin_xyz.template cast<Scalar>();
    R = R * detail::joint_rotation<Scalar>(model.joints[i], q[i]);
    out.links[i].position = p;
    out.links[i].rotation = R;
  }
  out.flange.position = p + R * model.flange.translation().template cast<Scalar>();
  out.flange.rotation = R * model.flange.rotation().template cast<Scalar>();
  return out;
}

template <typename Derived>
Pose<typename Derived::Scalar> forward_kinematics(const ArmModel& model, const Eigen::MatrixBase<Derived>& q) {
  return chain_poses(model, q).flange;
}

/// Geometric Jacobian of the flange origin: rows [linear; angular], world frame.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 6, kJoints> flange_jacobian(const ArmModel& model,
                                                                    const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  const auto poses = chain_poses(model, q);
  Eigen::Matrix<Scalar, 6, kJoints> J;
  for (int j = 0; j < kJoints; ++j) {
    const Vector3<Scalar> z = poses.links[j].rotation * model.joints[j].axis.template cast<Scalar>();
    J.template block<3, 1>(0, j) = z.cross(poses.flange.position - poses.links[j].position);
    J.template block<3, 1>(3, j) = z;
  }
  return J;
}

/// Recursive Newton-Euler: tau = M(q) qdd + C(q,qd) qd + g(q), load attached.
template <typename DQ, typename DQd, typename DQdd>
JointVector<typename DQ::Scalar> inverse_dynamics(const ArmModel& model, const Eigen::MatrixBase<DQ>& q,
                                                  const Eigen::MatrixBase<DQd>& qd,
                                                  const Eigen::MatrixBase<DQdd>& qdd, const LoadSpec& load) {
  using Scalar = typename DQ::Scalar;
  const auto links = effective_links(model, load);
  const Vector3<Scalar> g = model.gravity.template cast<Scalar>();
  const auto m = detail::forward_pass<Scalar>(model, q, qd, qdd, Vector3<Scalar>(-g));

  JointVector<Scalar> tau;
  Vector3<Scalar> f_next = Vector3<Scalar>::Zero();
  Vector3<Scalar> n_next = Vector3<Scalar>::Zero();
  for (int i = kJoints - 1; i >= 0; --i) {
    const Scalar mass = Scalar(links[i].mass);
    const Vector3<Scalar> c = links[i].com.template cast<Scalar>();
    const Matrix3<Scalar> I = links[i].inertia.template cast<Scalar>();
    const Vector3<Scalar> a_c = m.accel[i] + m.alpha[i].cross(c) + m.omega[i].cross(m.omega[i].cross(c));
    const Vector3<Scalar> F = mass * a_c;
    const Vector3<Scalar> N = I * m.alpha[i] + m.omega[i].cross(I * m.omega[i]);

    Vector3<Scalar> f = F;
    Vector3<Scalar> n = N + c.cross(F);
    if (i + 1 < kJoints) {
      const Matrix3<Scalar>& R_next = m.rotation[i + 1];
      const Vector3<Scalar> p_next = model.joints[i + 1].origin_xyz.template cast<Scalar>();
      const Vector3<Scalar> f_child = R_next * f_next;
      f += f_child;
      n += R_next * n_next + p_next.cross(f_child);
    }
    tau[i] = n.dot(model.joints[i].axis.template cast<Scalar>()) + Scalar(model.joints[i].armature) * qdd[i];
    f_next = f;
    n_next = n;
  }
  return tau;
}

/// Joint torques that hold the arm (and load) still against gravity.
template <typename Derived>
JointVector<typename Derived::Scalar> gravity_torque(const ArmModel& model, const Eigen::MatrixBase<Derived>& q,
                                                     const LoadSpec& load) {
  using Scalar = typename Derived::Scalar;
  const JointVector<Scalar> zero = JointVector<Scalar>::Zero();
  return inverse_dynamics(model, q, zero, zero, load);
}

/// Joint-space inertia from per-link COM Jacobians (independent of the
/// Newton-Euler recursion), plus armature on the diagonal.
template <typename Derived>
JointMatrix<typename Derived::Scalar> mass_matrix(const ArmModel& model, const Eigen::MatrixBase<Derived>& q,
                                                  const LoadSpec& load) {
  using Scalar = typename Derived::Scalar;
  const auto links = effective_links(model, load);
  const auto poses = chain_poses(model, q);
  JointMatrix<Scalar> M = JointMatrix<Scalar>::Zero();
  std::array<Vector3<Scalar>, kJoints> z;
  for (int j = 0; j < kJoints; ++j) z[j] = poses.links[j].rotation * model.joints[j].axis.template cast<Scalar>();

  for (int i = 0; i < kJoints; ++i) {
    const Matrix3<Scalar>& R = poses.links[i].rotation;
    const Vector3<Scalar> c = poses.links[i].position + R * links[i].com.template cast<Scalar>();
    Eigen::Matrix<Scalar, 3, kJoints> Jv = Eigen::Matrix<Scalar, 3, kJoints>::Zero();
    Eigen::Matrix<Scalar, 3, kJoints> Jw = Eigen::Matrix<Scalar, 3, kJoints>::Zero();
    for (int j = 0; j <= i; ++j) {
      Jv.col(j) = z[j].cross(c - poses.links[j].position);
      Jw.col(j) = z[j];
    }
    const Matrix3<Scalar> I_world = R * links[i].inertia.template cast<Scalar>() * R.transpose();
    M.noalias() += Scalar(links[i].mass) * Jv.transpose() * Jv + Jw.transpose() * I_world * Jw;
  }
  M.diagonal() += model.armature().template cast<Scalar>();
  return M;
}

template <typename Derived>
typename Derived::Scalar potential_energy(const ArmModel& model, const Eigen::MatrixBase<Derived>& q,
                                          const LoadSpec& load) {
  using Scalar = typename Derived::Scalar;
  const auto links = effective_links(model, load);
  const auto poses = chain_poses(model, q);
  Scalar U(0);
  for (int i = 0; i < kJoints; ++i) {
    const Vector3<Scalar> c = poses.links[i].position + poses.links[i].rotation * links[i].com.template cast<Scalar>();
    U -= Scalar(links[i].mass) * model.gravity.template cast<Scalar>().dot(c);
  }
  return U;
}

double kinetic_energy(const ArmModel& model, const JointState& state, const LoadSpec& load);

/// World-frame linear acceleration of a point fixed to the flange.
Eigen::Vector3d flange_point_acceleration(const ArmModel& model, const JointVectord& q, const JointVectord& qd,
                                          const JointVectord& qdd, const Eigen::Vector3d& offset);

struct StepResult {
  JointState state;
  JointVectord qdd = JointVectord::Zero();
  JointVectord applied_torque = JointVectord::Zero();
};

/// qdd = M^-1 (tau - C qd - g), then semi-implicit Euler. Torques are clamped
/// to the effort limits; positions are clamped to the joint limits with the
/// velocity zeroed at a stop.
StepResult forward_dynamics_step(const ArmModel& model, const JointState& state, const JointVectord& tau,
                                 const LoadSpec& load, double dt);

enum class WrenchMode { quasi_static, full };

struct SensorNoise {
  double force_sigma = 0.1;    // N
  double torque_sigma = 0.01;  // N*m
};

/// Simulated flange F/T sensor: m*(g - a_load) in the flange frame plus
/// zero-mean Gaussian noise. `qdd` is the latest plant acceleration.
Wrench end_effector_wrench(const ArmModel& model, const JointState& state, const JointVectord& qdd,
                           const LoadSpec& load, WrenchMode mode = WrenchMode::full);

Wrench add_sensor_noise(const Wrench& w, const SensorNoise& noise, std::mt19937_64& rng);

}  // namespace cbmc::arm
