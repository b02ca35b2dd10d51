#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cbmc/arm/dynamics.hpp"

namespace cbmc::trajectories {

enum class Family {
  horizontal_circle,
  vertical_circle,
  inclined_circle,
  figure_eight,
  tilted_rotated_circle,
};

Family family_from_string(const std::string& name);
std::string to_string(Family f);

/// Closed-form Cartesian reference. `theta` tilts circles about the y axis,
/// `phi` rotates the tilted circle about z; `secondary_radius` is the radius
/// along the sine term of the tilted-rotated circle.
struct CartesianTrajectorySpec {
  std::string name;
  Family family = Family::horizontal_circle;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.1;
  double secondary_radius = 0.1;
  double period = 3.0;
  double theta = 0.0;
  double phi = 0.0;
  double z_amplitude = 0.08;
  double duration = 0.0;  // s; 0 means one period

  void validate() const;
};

Eigen::Vector3d cartesian_point(const CartesianTrajectorySpec& spec, double t);

CartesianTrajectorySpec parse_trajectory_spec(const std::string& json_text, const std::string& origin = "<string>");
CartesianTrajectorySpec load_trajectory_spec(const std::filesystem::path& path);

/// The three simulation references: horizontal and inclined training circles
/// and the spatial figure-eight.
CartesianTrajectorySpec training_horizontal_circle();
CartesianTrajectorySpec training_inclined_circle();
CartesianTrajectorySpec figure_eight();

struct IkOptions {
  double damping = 1e-3;
  double step = 0.5;
  double position_tolerance = 1e-4;     // m
  double orientation_tolerance = 1e-3;  // rad
  int max_iterations = 200;
  /// Null-space pull toward `posture` on every iteration; it never changes the
  /// pose error. With a positive gain the iteration also runs until the
  /// null-space step is below `null_space_tolerance`, so the solution depends
  /// on the target only. Zero disables it.
  double posture_gain = 0.0;
  double null_space_tolerance = 1e-7;  // rad
  JointVectord posture = JointVectord::Zero();
};

struct IkResult {
  JointVectord q;
  int iterations = 0;
  double position_error = 0.0;
  double orientation_error = 0.0;
};

/// Raised when damped least squares does not reach tolerance.
class IkError : public Error {
 public:
  IkError(const std::string& what, double position_residual, double orientation_residual)
      : Error(what), position_residual(position_residual), orientation_residual(orientation_residual) {}
  double position_residual;
  double orientation_residual;
};

/// Orientation error as a rotation vector taking `current` to `target` (world frame).
Eigen::Vector3d orientation_error(const Eigen::Matrix3d& target, const Eigen::Matrix3d& current);

IkResult solve_ik_dls(const arm::ArmModel& model, const arm::Pose<double>& target, const JointVectord& q_seed,
                      const IkOptions& options = {});

struct JointTrajectory {
  double dt = 1e-3;
  std::vector<JointVectord> q;
  std::vector<JointVectord> qd;

  std::size_t size() const { return q.size(); }
};

/// Folded-arm start pose with the flange pointing straight down.
JointVectord ready_pose();

/// IK per sample, seeded with the previous solution; velocities by central
/// differences (one-sided at the ends). Fails loudly on IK failure, joint
/// limit violation or velocity limit violation.
JointTrajectory plan_joint_trajectory(const arm::ArmModel& model, const CartesianTrajectorySpec& spec, double dt,
                                      double duration, const Eigen::Matrix3d& orientation,
                                      const JointVectord& q_seed, const IkOptions& options = {});

/// Same, with the orientation, seed and null-space posture taken from
/// ready_pose(), so repeated laps settle onto a periodic joint path.
JointTrajectory plan_joint_trajectory(const arm::ArmModel& model, const CartesianTrajectorySpec& spec, double dt,
                                      double duration);

std::pair<JointVectord, JointVectord> replay(const JointTrajectory& traj, std::size_t tick);

void save_trajectory_csv(const JointTrajectory& traj, const std::filesystem::path& path);
JointTrajectory load_trajectory_csv(const std::filesystem::path& path);

}  // namespace cbmc::trajectories
