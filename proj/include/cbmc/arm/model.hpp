#pragma once

#include <Eigen/Geometry>
#include <array>
#include <filesystem>
#include <string>

#include "cbmc/types.hpp"

namespace cbmc::arm {

struct JointLimits {
  double lower = 0.0;     // rad
  double upper = 0.0;     // rad
  double velocity = 0.0;  // rad/s
  double effort = 0.0;    // N*m
};

/// Revolute joint: fixed transform from the parent link frame, then rotation
/// about `axis` (expressed in the joint frame, which is the child link frame).
struct JointSpec {
  std::string name;
  Eigen::Vector3d origin_xyz = Eigen::Vector3d::Zero();
  Eigen::Vector3d origin_rpy = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  JointLimits limits;
  double armature = 0.0;  // reflected rotor inertia, kg*m^2

  Eigen::Matrix3d origin_rotation() const;
};

struct LinkSpec {
  double mass = 0.0;                                     // kg
  Eigen::Vector3d com = Eigen::Vector3d::Zero();         // m, link frame
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Identity();  // kg*m^2, about the COM
};

struct ArmModel {
  std::string name;
  std::array<JointSpec, kJoints> joints;
  std::array<LinkSpec, kJoints> links;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
  Eigen::Isometry3d flange = Eigen::Isometry3d::Identity();  // relative to the last link

  JointVectord lower_limits() const;
  JointVectord upper_limits() const;
  JointVectord velocity_limits() const;
  JointVectord effort_limits() const;
  JointVectord armature() const;

  /// Throws Error naming the offending field.
  void validate() const;
};

/// Rigid point mass attached at an offset from the flange (flange frame).
struct LoadSpec {
  double mass = 0.0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
};

/// Parses the JSON arm description; see assets/models/README.md for the schema.
ArmModel load_model(const std::filesystem::path& path);
ArmModel parse_model(const std::string& json_text, const std::string& origin = "<string>");

/// Model shipped under assets/models.
std::filesystem::path default_model_path();

}  // namespace cbmc::arm
