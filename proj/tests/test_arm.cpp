#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cbmc;
using cbmc::testing::random_configuration;
using cbmc::testing::random_vector;
using cbmc::testing::shipped_model;

namespace {

std::string shipped_json() {
  std::ifstream in(arm::default_model_path());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

arm::ArmModel massless_copy(const arm::ArmModel& model) {
  arm::ArmModel m = model;
  for (auto& l : m.links) {
    l.mass = 0.0;
    l.com.setZero();
    l.inertia.setZero();
  }
  return m;
}

}  // namespace

TEST_CASE("shipped model loads with seven joints") {
  const auto& model = shipped_model();
  CHECK(model.joints.size() == 7);
  CHECK_NOTHROW(model.validate());
}

TEST_CASE("model parser rejects a six-joint file") {
  auto doc = nlohmann::json::parse(shipped_json());
  doc["joints"].erase(doc["joints"].size() - 1);
  try {
    arm::parse_model(doc.dump());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("expected 7 joints") != std::string::npos);
  }
}

TEST_CASE("model parser rejects a negative link mass") {
  auto doc = nlohmann::json::parse(shipped_json());
  doc["links"][2]["mass"] = -1.0;
  CHECK_THROWS_AS(arm::parse_model(doc.dump()), Error);
}

TEST_CASE("model parser reports the missing field") {
  auto doc = nlohmann::json::parse(shipped_json());
  doc["joints"][3]["limits"].erase("effort");
  try {
    arm::parse_model(doc.dump());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("joints[3].limits.effort") != std::string::npos);
  }
}

TEST_CASE("model parser reports syntax errors with a position") {
  try {
    arm::parse_model("{\"joints\": [1, 2,,]}", "broken.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("broken.json") != std::string::npos);
    CHECK(msg.find("line") != std::string::npos);
  }
}

TEST_CASE("zero configuration flange pose") {
  // Stacked offsets of the Panda-class chain at q = 0: the arm points straight
  // up with the 0.088 m wrist offset along x and the flange pointing down.
  const auto pose = arm::forward_kinematics(shipped_model(), JointVectord::Zero());
  CHECK(pose.position.x() == doctest::Approx(0.088).epsilon(1e-12));
  CHECK(pose.position.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pose.position.z() == doctest::Approx(0.333 + 0.316 + 0.384 - 0.107).epsilon(1e-12));
  CHECK((pose.rotation.col(2) - Eigen::Vector3d(0, 0, -1)).norm() < 1e-12);
}

TEST_CASE("rotating joint 1 by pi mirrors the flange about the base z axis") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    JointVectord q = random_configuration(shipped_model(), rng, 0.0);
    q[0] = 0.3;
    JointVectord q2 = q;
    q2[0] = 0.3 - M_PI;
    const auto a = arm::forward_kinematics(shipped_model(), q).position;
    const auto b = arm::forward_kinematics(shipped_model(), q2).position;
    CHECK(b.x() == doctest::Approx(-a.x()));
    CHECK(b.y() == doctest::Approx(-a.y()));
    CHECK(b.z() == doctest::Approx(a.z()));
  }
}

TEST_CASE("flange jacobian matches finite differences of forward kinematics") {
  std::mt19937_64 rng(3);
  const auto& model = shipped_model();
  for (int k = 0; k < 10; ++k) {
    const JointVectord q = random_configuration(model, rng);
    const auto J = arm::flange_jacobian(model, q);
    const auto base = arm::forward_kinematics(model, q);
    const double h = 1e-7;
    for (int j = 0; j < kJoints; ++j) {
      JointVectord qp = q;
      qp[j] += h;
      const auto p = arm::forward_kinematics(model, qp);
      const Eigen::Vector3d dv = (p.position - base.position) / h;
      const Eigen::AngleAxisd dr(Eigen::Matrix3d(p.rotation * base.rotation.transpose()));
      const Eigen::Vector3d dw = dr.angle() * dr.axis() / h;
      CHECK((dv - J.block<3, 1>(0, j)).norm() < 1e-6);
      CHECK((dw - J.block<3, 1>(3, j)).norm() < 1e-6);
    }
  }
}

TEST_CASE("gravity torque vanishes without gravity") {
  arm::ArmModel model = shipped_model();
  model.gravity.setZero();
  std::mt19937_64 rng(5);
  const JointVectord q = random_configuration(model, rng);
  CHECK(arm::gravity_torque(model, q, {2.0, Eigen::Vector3d(0, 0, 0.05)}).norm() == 0.0);
}

TEST_CASE("single-link pendulum reduction") {
  // Only link 2 carries mass, a point at distance l along its x axis. Joint 2
  // turns about world +y, so the COM sits at (l cos q, 0, h - l sin q) and the
  // holding torque is dU/dq = -m g l cos q; |tau| = m g l sin(angle from vertical).
  arm::ArmModel model = massless_copy(shipped_model());
  const double m = 2.0, l = 0.3, g = 9.81;
  model.links[1].mass = m;
  model.links[1].com = {l, 0.0, 0.0};
  for (double q2 : {-1.2, -0.4, 0.0, 0.5, 1.1}) {
    JointVectord q = JointVectord::Zero();
    q[1] = q2;
    const JointVectord tau = arm::gravity_torque(model, q, {});
    CHECK(tau[1] == doctest::Approx(-m * g * l * std::cos(q2)).epsilon(1e-12));
    for (int i = 2; i < kJoints; ++i) CHECK(std::abs(tau[i]) < 1e-12);
    const Eigen::Vector3d c(l * std::cos(q2), 0.0, -l * std::sin(q2));
    const double from_vertical = std::acos(-c.z() / l);
    CHECK(std::abs(tau[1]) == doctest::Approx(m * g * l * std::sin(from_vertical)).epsilon(1e-9));
  }
}

TEST_CASE("gravity torque is the potential energy gradient") {
  std::mt19937_64 rng(17);
  const auto& model = shipped_model();
  for (double mass : {0.0, 3.0}) {
    const arm::LoadSpec load{mass, Eigen::Vector3d(0.01, -0.02, 0.05)};
    for (int k = 0; k < 25; ++k) {
      const JointVectord q = random_configuration(model, rng);
      const JointVectord tau = arm::gravity_torque(model, q, load);
      const JointVectord fd = testing::energy_gradient(model, q, load);
      CHECK((tau - fd).norm() <= 1e-6 * tau.norm());
    }
  }
}

TEST_CASE("mass matrix matches inverse-dynamics column probes") {
  std::mt19937_64 rng(23);
  const auto& model = shipped_model();
  const arm::LoadSpec load{1.5, Eigen::Vector3d(0, 0, 0.04)};
  for (int k = 0; k < 20; ++k) {
    const JointVectord q = random_configuration(model, rng);
    const JointMatrixd M = arm::mass_matrix(model, q, load);
    const JointVectord g = arm::gravity_torque(model, q, load);
    for (int j = 0; j < kJoints; ++j) {
      const JointVectord col =
          arm::inverse_dynamics(model, q, JointVectord::Zero(), JointVectord::Unit(j), load) - g;
      CHECK((col - M.col(j)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("mass matrix is symmetric positive definite") {
  std::mt19937_64 rng(29);
  const auto& model = shipped_model();
  for (int k = 0; k < 100; ++k) {
    const JointVectord q = random_configuration(model, rng, 0.0);
    const JointMatrixd M = arm::mass_matrix(model, q, {3.5, Eigen::Vector3d::Zero()});
    CHECK((M - M.transpose()).norm() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<JointMatrixd> es(M);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("inverse dynamics with zero rates equals gravity torque") {
  std::mt19937_64 rng(31);
  const JointVectord q = random_configuration(shipped_model(), rng);
  const arm::LoadSpec load{2.0, Eigen::Vector3d::Zero()};
  const JointVectord z = JointVectord::Zero();
  CHECK((arm::inverse_dynamics(shipped_model(), q, z, z, load) - arm::gravity_torque(shipped_model(), q, load))
            .norm() == 0.0);
}

TEST_CASE("holding gravity torque keeps the arm still for one second") {
  std::mt19937_64 rng(37);
  const auto& model = shipped_model();
  for (double mass : {0.0, 3.5}) {
    const arm::LoadSpec load{mass, Eigen::Vector3d::Zero()};
    arm::JointState s;
    s.q = random_configuration(model, rng, 0.1);
    const JointVectord q0 = s.q;
    for (int t = 0; t < 1000; ++t)
      s = arm::forward_dynamics_step(model, s, arm::gravity_torque(model, s.q, load), load, 1e-3).state;
    CHECK((s.q - q0).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("free spin about a principal axis is uniform") {
  arm::ArmModel model = massless_copy(shipped_model());
  model.gravity.setZero();
  model.links[6].mass = 1.0;
  model.links[6].inertia = Eigen::Vector3d(0.02, 0.03, 0.01).asDiagonal();
  std::mt19937_64 rng(41);
  arm::JointState s;
  s.q = random_configuration(model, rng, 0.2);
  s.q[6] = -2.0;
  s.qd[6] = 1.5;
  const double q7 = s.q[6];
  for (int t = 0; t < 1000; ++t) s = arm::forward_dynamics_step(model, s, JointVectord::Zero(), {}, 1e-3).state;
  CHECK(s.qd[6] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(s.q[6] == doctest::Approx(q7 + 1.5).epsilon(1e-9));
  CHECK(s.qd.head<6>().norm() < 1e-9);
}

TEST_CASE("integrator error over a fixed horizon is first order in dt") {
  const auto& model = shipped_model();
  std::mt19937_64 rng(43);
  arm::JointState s0;
  s0.q = random_configuration(model, rng, 0.2);
  s0.qd = random_vector(rng, 0.3);
  const arm::LoadSpec load{1.0, Eigen::Vector3d::Zero()};
  auto rollout = [&](double dt, double horizon) {
    arm::JointState s = s0;
    const int n = static_cast<int>(std::lround(horizon / dt));
    for (int t = 0; t < n; ++t) s = arm::forward_dynamics_step(model, s, JointVectord::Zero(), load, dt).state;
    return s.q;
  };
  const JointVectord ref = rollout(1e-6, 0.02);
  const double e1 = (rollout(1e-4, 0.02) - ref).norm();
  const double e2 = (rollout(2e-4, 0.02) - ref).norm();
  CHECK(e2 / e1 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("energy balance along a torque-driven rollout") {
  const auto& model = shipped_model();
  std::mt19937_64 rng(47);
  arm::JointState s;
  s.q = random_configuration(model, rng, 0.3);
  const arm::LoadSpec load{2.0, Eigen::Vector3d::Zero()};
  const JointVectord a = random_vector(rng, 5.0);
  const double dt = 1e-5;
  auto energy = [&](const arm::JointState& st) {
    return arm::kinetic_energy(model, st, load) + arm::potential_energy(model, st.q, load);
  };
  const double e0 = energy(s);
  double work = 0.0, abs_work = 0.0;
  for (int t = 0; t < 30000; ++t) {
    const double time = t * dt;
    const JointVectord tau = arm::gravity_torque(model, s.q, load) + a * std::sin(6.0 * time);
    const arm::JointState prev = s;
    s = arm::forward_dynamics_step(model, s, tau, load, dt).state;
    const double p = 0.5 * (prev.qd + s.qd).dot(tau) * dt;
    work += p;
    abs_work += std::abs(p);
  }
  CHECK(std::abs(energy(s) - e0 - work) <= 1e-3 * abs_work);
}

TEST_CASE("static load wrench at the ready pose") {
  const auto& model = shipped_model();
  arm::JointState s;
  s.q << 0.0, -M_PI / 4, 0.0, -3 * M_PI / 4, 0.0, M_PI / 2, M_PI / 4;
  const auto w = arm::end_effector_wrench(model, s, JointVectord::Zero(), {2.0, Eigen::Vector3d::Zero()});
  CHECK(w.force.norm() == doctest::Approx(19.62).epsilon(1e-9));
  CHECK(w.force.z() == doctest::Approx(19.62).epsilon(1e-9));
  CHECK(w.torque.norm() < 1e-12);
  const auto none = arm::end_effector_wrench(model, s, JointVectord::Zero(), {0.0, Eigen::Vector3d::Zero()});
  CHECK(none.stacked().norm() == 0.0);
}

TEST_CASE("noisy static wrench stays within sensor noise of m g") {
  const auto& model = shipped_model();
  arm::JointState s;
  s.q << 0.0, -M_PI / 4, 0.0, -3 * M_PI / 4, 0.0, M_PI / 2, M_PI / 4;
  std::mt19937_64 rng(53);
  const auto clean = arm::end_effector_wrench(model, s, JointVectord::Zero(), {1.5, Eigen::Vector3d::Zero()});
  for (int k = 0; k < 100; ++k) {
    const auto w = arm::add_sensor_noise(clean, {}, rng);
    CHECK(std::abs(w.force.z() - 1.5 * 9.81) < 5 * 0.1);
  }
}

TEST_CASE("joint 1 spin shows the centripetal force") {
  const auto& model = shipped_model();
  arm::JointState s;
  s.q << 0.0, -M_PI / 4, 0.0, -3 * M_PI / 4, 0.0, M_PI / 2, M_PI / 4;
  const double omega = 1.2, m = 2.0;
  s.qd[0] = omega;
  const auto pose = arm::forward_kinematics(model, s.q);
  const double r = pose.position.head<2>().norm();
  const auto w = arm::end_effector_wrench(model, s, JointVectord::Zero(), {m, Eigen::Vector3d::Zero()});
  const Eigen::Vector3d world = pose.rotation * w.force;
  CHECK(world.head<2>().norm() == doctest::Approx(m * omega * omega * r).epsilon(1e-9));
  // Reaction points away from the spin axis.
  CHECK(world.head<2>().dot(pose.position.head<2>()) > 0.0);
  const auto qs = arm::end_effector_wrench(model, s, JointVectord::Zero(), {m, Eigen::Vector3d::Zero()},
                                           arm::WrenchMode::quasi_static);
  CHECK((pose.rotation * qs.force).head<2>().norm() < 1e-12);
}

TEST_CASE("forward dynamics clamps torque and stops at joint limits") {
  const auto& model = shipped_model();
  arm::JointState s;
  s.q << 0.0, -M_PI / 4, 0.0, -3 * M_PI / 4, 0.0, M_PI / 2, M_PI / 4;
  s.q[0] = model.joints[0].limits.upper - 1e-6;
  s.qd[0] = 1.0;
  JointVectord tau = arm::gravity_torque(model, s.q, {});
  tau[0] = 1e6;
  const auto r = arm::forward_dynamics_step(model, s, tau, {}, 1e-3);
  CHECK(r.applied_torque[0] == model.joints[0].limits.effort);
  CHECK(r.state.q[0] == model.joints[0].limits.upper);
  CHECK(r.state.qd[0] == 0.0);
  JointVectord bad = tau;
  bad[2] = std::nan("");
  CHECK_THROWS_AS(arm::forward_dynamics_step(model, s, bad, {}, 1e-3), Error);
}
