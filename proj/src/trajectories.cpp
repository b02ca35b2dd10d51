#include "cbmc/trajectories.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace cbmc::trajectories {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDefaultPostureGain = 0.5;
}

Family family_from_string(const std::string& name) {
  if (name == "horizontal-circle") return Family::horizontal_circle;
  if (name == "vertical-circle") return Family::vertical_circle;
  if (name == "inclined-circle") return Family::inclined_circle;
  if (name == "figure-eight") return Family::figure_eight;
  if (name == "tilted-rotated-circle") return Family::tilted_rotated_circle;
  throw Error("unknown trajectory family '" + name + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::horizontal_circle: return "horizontal-circle";
    case Family::vertical_circle: return "vertical-circle";
    case Family::inclined_circle: return "inclined-circle";
    case Family::figure_eight: return "figure-eight";
    case Family::tilted_rotated_circle: return "tilted-rotated-circle";
  }
  return "unknown";
}

void CartesianTrajectorySpec::validate() const {
  if (!(radius > 0)) throw Error("trajectory '" + name + "': radius must be positive");
  if (!(secondary_radius > 0)) throw Error("trajectory '" + name + "': secondary radius must be positive");
  if (!(period > 0)) throw Error("trajectory '" + name + "': period must be positive");
  if (!(duration >= 0)) throw Error("trajectory '" + name + "': duration must be non-negative");
  if (!center.allFinite()) throw Error("trajectory '" + name + "': non-finite center");
}

Eigen::Vector3d cartesian_point(const CartesianTrajectorySpec& s, double t) {
  if (!(t >= 0)) throw Error("cartesian_point: t must be non-negative");
  const double w = 2.0 * kPi * t / s.period;
  const double c = std::cos(w), sn = std::sin(w);
  const Eigen::Vector3d& o = s.center;
  const double R = s.radius;
  switch (s.family) {
    case Family::horizontal_circle:
      return {o.x() + R * c, o.y() + R * sn, o.z()};
    case Family::vertical_circle:
      return {o.x(), o.y() + R * sn, o.z() + R * c};
    case Family::inclined_circle:
      return {o.x() + R * c * std::cos(s.theta), o.y() + R * sn, o.z() + R * c * std::sin(s.theta)};
    case Family::figure_eight:
      return {o.x() + 0.5 * R * std::sin(2.0 * w), o.y() + R * c, o.z() + s.z_amplitude * sn};
    case Family::tilted_rotated_circle: {
      const double r2 = s.secondary_radius;
      const double ct = std::cos(s.theta), st = std::sin(s.theta);
      const double cp = std::cos(s.phi), sp = std::sin(s.phi);
      return {o.x() + R * c * ct * cp - r2 * sn * sp, o.y() + R * c * ct * sp + r2 * sn * cp, o.z() + R * c * st};
    }
  }
  throw Error("cartesian_point: unknown family");
}

CartesianTrajectorySpec parse_trajectory_spec(const std::string& json_text, const std::string& origin) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(origin + ": " + e.what());
  }
  auto fail = [&](const std::string& f, const std::string& what) -> void {
    throw Error(origin + ": field '" + f + "': " + what);
  };
  auto num = [&](const char* key, double fallback, bool required) {
    if (!doc.contains(key)) {
      if (required) fail(key, "missing");
      return fallback;
    }
    if (!doc[key].is_number()) fail(key, "expected a number");
    return doc[key].get<double>();
  };
  CartesianTrajectorySpec s;
  if (!doc.contains("family") || !doc["family"].is_string()) fail("family", "missing or not a string");
  s.family = family_from_string(doc["family"].get<std::string>());
  s.name = doc.value("name", to_string(s.family));
  if (!doc.contains("center") || !doc["center"].is_array() || doc["center"].size() != 3)
    fail("center", "expected an array of 3 numbers");
  for (int i = 0; i < 3; ++i) s.center[i] = doc["center"][i].get<double>();
  s.radius = num("radius", 0, true);
  s.secondary_radius = num("secondary_radius", s.radius, false);
  s.period = num("period", 0, true);
  s.z_amplitude = num("z_amplitude", s.z_amplitude, false);
  s.duration = num("duration", 0.0, false);
  if (doc.contains("tilt")) {
    const json& tilt = doc["tilt"];
    if (tilt.is_number()) {
      s.theta = tilt.get<double>();
    } else if (tilt.is_array() && tilt.size() == 2) {
      s.theta = tilt[0].get<double>();
      s.phi = tilt[1].get<double>();
    } else {
      fail("tilt", "expected a number or [theta, phi]");
    }
  }
  s.validate();
  return s;
}

CartesianTrajectorySpec load_trajectory_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trajectory_spec(ss.str(), path.string());
}

CartesianTrajectorySpec training_horizontal_circle() {
  CartesianTrajectorySpec s;
  s.name = "horizontal-circle";
  s.family = Family::horizontal_circle;
  s.center = {0.54, 0.0, 0.45};
  s.radius = s.secondary_radius = 0.14;
  s.period = 3.0;
  return s;
}

CartesianTrajectorySpec training_inclined_circle() {
  CartesianTrajectorySpec s;
  s.name = "inclined-circle";
  s.family = Family::inclined_circle;
  s.center = {0.63, -0.11, 0.3};
  s.radius = s.secondary_radius = 0.14;
  s.period = 3.0;
  s.theta = -kPi / 6.0;
  return s;
}

CartesianTrajectorySpec figure_eight() {
  CartesianTrajectorySpec s;
  s.name = "figure-eight";
  s.family = Family::figure_eight;
  s.center = {0.61, 0.0, 0.3};
  s.radius = s.secondary_radius = 0.14;
  s.period = 3.0;
  s.z_amplitude = 0.08;
  return s;
}

Eigen::Vector3d orientation_error(const Eigen::Matrix3d& target, const Eigen::Matrix3d& current) {
  const Eigen::AngleAxisd aa(Eigen::Matrix3d(target * current.transpose()));
  return aa.angle() * aa.axis();
}

IkResult solve_ik_dls(const arm::ArmModel& model, const arm::Pose<double>& target, const JointVectord& q_seed,
                      const IkOptions& opt) {
  IkResult r;
  r.q = q_seed;
  const double lambda2 = opt.damping * opt.damping;
  for (int it = 0;; ++it) {
    const auto pose = arm::forward_kinematics(model, r.q);
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.position - pose.position;
    e.tail<3>() = orientation_error(target.rotation, pose.rotation);
    r.iterations = it;
    r.position_error = e.head<3>().norm();
    r.orientation_error = e.tail<3>().norm();
    const bool pose_ok = r.position_error <= opt.position_tolerance && r.orientation_error <= opt.orientation_tolerance;

    const auto J = arm::flange_jacobian(model, r.q);
    const Eigen::Matrix<double, 6, 6> JJt = J * J.transpose() + lambda2 * Eigen::Matrix<double, 6, 6>::Identity();
    const auto solver = JJt.ldlt();
    JointVectord null_step = JointVectord::Zero();
    if (opt.posture_gain > 0.0) {
      const JointVectord pull = opt.posture_gain * (opt.posture - r.q);
      null_step = pull - J.transpose() * solver.solve(J * pull);
    }
    if (pose_ok && opt.step * null_step.norm() <= opt.null_space_tolerance) return r;
    if (it >= opt.max_iterations || !e.allFinite()) {
      if (pose_ok) return r;
      std::ostringstream os;
      os << "solve_ik_dls: no convergence after " << it << " iterations (position residual " << r.position_error
         << " m, orientation residual " << r.orientation_error << " rad)";
      throw IkError(os.str(), r.position_error, r.orientation_error);
    }
    r.q += opt.step * (J.transpose() * solver.solve(e) + null_step);
  }
}

JointVectord ready_pose() {
  JointVectord q;
  q << 0.0, -kPi / 4.0, 0.0, -3.0 * kPi / 4.0, 0.0, kPi / 2.0, kPi / 4.0;
  return q;
}

JointTrajectory plan_joint_trajectory(const arm::ArmModel& model, const CartesianTrajectorySpec& spec, double dt,
                                      double duration, const Eigen::Matrix3d& orientation,
                                      const JointVectord& q_seed, const IkOptions& options) {
  spec.validate();
  if (!(dt > 0)) throw Error("plan_joint_trajectory: dt must be positive");
  if (!(duration > 0)) duration = spec.duration > 0 ? spec.duration : spec.period;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  if (n < 2) throw Error("plan_joint_trajectory: need at least two samples");

  JointTrajectory traj;
  traj.dt = dt;
  traj.q.resize(n);
  traj.qd.resize(n);
  const JointVectord lo = model.lower_limits(), hi = model.upper_limits(), vmax = model.velocity_limits();

  // With the posture term every sample is a function of its target alone, so
  // one lap can be reused for all later laps.
  std::size_t lap = n;
  const double lap_samples = spec.period / dt;
  if (options.posture_gain > 0.0 && std::abs(lap_samples - std::round(lap_samples)) < 1e-9 && lap_samples >= 2)
    lap = std::min(n, static_cast<std::size_t>(std::llround(lap_samples)));

  arm::Pose<double> target;
  target.rotation = orientation;
  JointVectord seed = q_seed;
  for (std::size_t k = 0; k < n; ++k) {
    if (k >= lap) {
      traj.q[k] = traj.q[k - lap];
      continue;
    }
    target.position = cartesian_point(spec, static_cast<double>(k) * dt);
    try {
      seed = solve_ik_dls(model, target, seed, options).q;
    } catch (const IkError& e) {
      throw IkError("plan_joint_trajectory: sample " + std::to_string(k) + ": " + e.what(), e.position_residual,
                    e.orientation_residual);
    }
    if ((seed.array() < lo.array()).any() || (seed.array() > hi.array()).any())
      throw Error("plan_joint_trajectory: sample " + std::to_string(k) + " violates joint position limits");
    traj.q[k] = seed;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0)
      traj.qd[k] = (traj.q[1] - traj.q[0]) / dt;
    else if (k + 1 == n)
      traj.qd[k] = (traj.q[k] - traj.q[k - 1]) / dt;
    else
      traj.qd[k] = (traj.q[k + 1] - traj.q[k - 1]) / (2.0 * dt);
    if (k > 0 && ((traj.q[k] - traj.q[k - 1]).cwiseAbs().array() > vmax.array() * dt).any())
      throw Error("plan_joint_trajectory: sample " + std::to_string(k) + " violates joint velocity limits");
  }
  return traj;
}

JointTrajectory plan_joint_trajectory(const arm::ArmModel& model, const CartesianTrajectorySpec& spec, double dt,
                                      double duration) {
  const JointVectord seed = ready_pose();
  IkOptions options;
  options.posture = seed;
  options.posture_gain = kDefaultPostureGain;
  return plan_joint_trajectory(model, spec, dt, duration, arm::forward_kinematics(model, seed).rotation, seed,
                               options);
}

std::pair<JointVectord, JointVectord> replay(const JointTrajectory& traj, std::size_t tick) {
  if (tick >= traj.size())
    throw Error("replay: tick " + std::to_string(tick) + " out of range [0, " + std::to_string(traj.size()) + ")");
  return {traj.q[tick], traj.qd[tick]};
}

void save_trajectory_csv(const JointTrajectory& traj, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file " + path.string());
  out << "# dt=" << std::setprecision(17) << traj.dt << "\n";
  out << "tick";
  for (int i = 1; i <= kJoints; ++i) out << ",q_d" << i;
  for (int i = 1; i <= kJoints; ++i) out << ",qd_d" << i;
  out << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << k;
    for (int i = 0; i < kJoints; ++i) out << "," << traj.q[k][i];
    for (int i = 0; i < kJoints; ++i) out << "," << traj.qd[k][i];
    out << "\n";
  }
  if (!out) throw Error("write failed for " + path.string());
}

JointTrajectory load_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file " + path.string());
  JointTrajectory traj;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# dt=", 0) != 0) throw Error(path.string() + ": missing dt header");
  traj.dt = std::stod(line.substr(5));
  std::getline(in, line);  // column names
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 1 + 2 * kJoints) throw Error(path.string() + ": bad row " + std::to_string(row));
    JointVectord q, qd;
    for (int i = 0; i < kJoints; ++i) {
      q[i] = v[1 + i];
      qd[i] = v[1 + kJoints + i];
    }
    traj.q.push_back(q);
    traj.qd.push_back(qd);
    ++row;
  }
  return traj;
}

}  // namespace cbmc::trajectories
