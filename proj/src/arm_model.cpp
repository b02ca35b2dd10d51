#include "cbmc/arm/model.hpp"

#include <Eigen/Eigenvalues>
#include <cstdlib>
#include <fstream>
#include "json.hpp"
#include <sstream>

namespace cbmc::arm {

using nlohmann::json;

Eigen::Matrix3d JointSpec::origin_rotation() const {
  // URDF convention: R = Rz(yaw) * Ry(pitch) * Rx(roll)
  return (Eigen::AngleAxisd(origin_rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(origin_rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(origin_rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

namespace {

template <typename F>
JointVectord collect(const ArmModel& m, F f) {
  JointVectord v;
  for (int i = 0; i < kJoints; ++i) v[i] = f(m.joints[i]);
  return v;
}

class FieldReader {
 public:
  explicit FieldReader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw Error(origin_ + ": field '" + field + "': " + what);
  }

  const json& at(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
  }

  double number(const json& obj, const std::string& key, const std::string& path) const {
    const json& v = at(obj, key, path);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
  }

  double number_or(const json& obj, const std::string& key, const std::string& path, double fallback) const {
    if (!obj.contains(key)) return fallback;
    return number(obj, key, path);
  }

  Eigen::Vector3d vec3(const json& obj, const std::string& key, const std::string& path) const {
    const json& v = at(obj, key, path);
    if (!v.is_array() || v.size() != 3) fail(path + "." + key, "expected an array of 3 numbers");
    Eigen::Vector3d out;
    for (int i = 0; i < 3; ++i) {
      if (!v[i].is_number()) fail(path + "." + key, "expected an array of 3 numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  Eigen::Vector3d vec3_or(const json& obj, const std::string& key, const std::string& path,
                          const Eigen::Vector3d& fallback) const {
    if (!obj.contains(key)) return fallback;
    return vec3(obj, key, path);
  }

 private:
  std::string origin_;
};

}  // namespace

JointVectord ArmModel::lower_limits() const { return collect(*this, [](const JointSpec& j) { return j.limits.lower; }); }
JointVectord ArmModel::upper_limits() const { return collect(*this, [](const JointSpec& j) { return j.limits.upper; }); }
JointVectord ArmModel::velocity_limits() const {
  return collect(*this, [](const JointSpec& j) { return j.limits.velocity; });
}
JointVectord ArmModel::effort_limits() const { return collect(*this, [](const JointSpec& j) { return j.limits.effort; }); }
JointVectord ArmModel::armature() const { return collect(*this, [](const JointSpec& j) { return j.armature; }); }

void ArmModel::validate() const {
  for (int i = 0; i < kJoints; ++i) {
    const auto& j = joints[i];
    const std::string jp = "joints[" + std::to_string(i) + "]";
    if (!j.origin_xyz.allFinite() || !j.origin_rpy.allFinite()) throw Error(jp + ".origin: non-finite");
    if (!(j.axis.norm() > 0.5 && j.axis.allFinite())) throw Error(jp + ".axis: must be a unit vector");
    const auto& l = j.limits;
    if (!std::isfinite(l.lower) || !std::isfinite(l.upper) || !(l.lower < l.upper))
      throw Error(jp + ".limits: need finite lower < upper");
    if (!(std::isfinite(l.velocity) && l.velocity > 0)) throw Error(jp + ".limits.velocity: must be positive");
    if (!(std::isfinite(l.effort) && l.effort > 0)) throw Error(jp + ".limits.effort: must be positive");
    if (!(j.armature >= 0)) throw Error(jp + ".armature: must be non-negative");

    const auto& link = links[i];
    const std::string lp = "links[" + std::to_string(i) + "]";
    if (!(link.mass > 0) || !std::isfinite(link.mass)) throw Error(lp + ".mass: must be positive");
    if (!link.com.allFinite()) throw Error(lp + ".com: non-finite");
    if ((link.inertia - link.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw Error(lp + ".inertia: not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(link.inertia, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0)) throw Error(lp + ".inertia: not positive definite");
  }
  if (!gravity.allFinite()) throw Error("gravity: non-finite");
}

ArmModel parse_model(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(origin + ": " + e.what());
  }
  FieldReader r(origin);
  ArmModel m;
  if (doc.contains("name") && doc["name"].is_string()) m.name = doc["name"].get<std::string>();
  m.gravity = r.vec3_or(doc, "gravity", "", m.gravity);

  const json& joints = r.at(doc, "joints", "");
  const json& links = r.at(doc, "links", "");
  if (!joints.is_array()) r.fail("joints", "expected an array");
  if (!links.is_array()) r.fail("links", "expected an array");
  if (joints.size() != kJoints)
    r.fail("joints", "expected 7 joints, found " + std::to_string(joints.size()));
  if (links.size() != kJoints) r.fail("links", "expected 7 links, found " + std::to_string(links.size()));

  for (int i = 0; i < kJoints; ++i) {
    const std::string jp = "joints[" + std::to_string(i) + "]";
    const json& j = joints[i];
    auto& spec = m.joints[i];
    spec.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "joint" + std::to_string(i + 1);
    const json& o = r.at(j, "origin", jp);
    spec.origin_xyz = r.vec3(o, "xyz", jp + ".origin");
    spec.origin_rpy = r.vec3_or(o, "rpy", jp + ".origin", Eigen::Vector3d::Zero());
    spec.axis = r.vec3(j, "axis", jp);
    if (spec.axis.norm() > 0) spec.axis.normalize();
    const json& lim = r.at(j, "limits", jp);
    spec.limits.lower = r.number(lim, "lower", jp + ".limits");
    spec.limits.upper = r.number(lim, "upper", jp + ".limits");
    spec.limits.velocity = r.number(lim, "velocity", jp + ".limits");
    spec.limits.effort = r.number(lim, "effort", jp + ".limits");
    spec.armature = r.number_or(j, "armature", jp, 0.0);

    const std::string lp = "links[" + std::to_string(i) + "]";
    const json& l = links[i];
    auto& link = m.links[i];
    link.mass = r.number(l, "mass", lp);
    link.com = r.vec3(l, "com", lp);
    const json& in = r.at(l, "inertia", lp);
    const std::string ip = lp + ".inertia";
    const double ixx = r.number(in, "ixx", ip), iyy = r.number(in, "iyy", ip), izz = r.number(in, "izz", ip);
    const double ixy = r.number_or(in, "ixy", ip, 0), ixz = r.number_or(in, "ixz", ip, 0), iyz = r.number_or(in, "iyz", ip, 0);
    link.inertia << ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz;
  }

  if (doc.contains("flange")) {
    const json& f = doc["flange"];
    JointSpec tmp;
    tmp.origin_xyz = r.vec3_or(f, "xyz", "flange", Eigen::Vector3d::Zero());
    tmp.origin_rpy = r.vec3_or(f, "rpy", "flange", Eigen::Vector3d::Zero());
    m.flange = Eigen::Isometry3d::Identity();
    m.flange.linear() = tmp.origin_rotation();
    m.flange.translation() = tmp.origin_xyz;
  }

  try {
    m.validate();
  } catch (const Error& e) {
    throw Error(origin + ": " + e.what());
  }
  return m;
}

ArmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open arm model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path.string());
}

std::filesystem::path default_model_path() {
  if (const char* env = std::getenv("CBMC_ASSETS")) return std::filesystem::path(env) / "models" / "panda_class.json";
  return std::filesystem::path(CBMC_ASSET_DIR) / "models" / "panda_class.json";
}

}  // namespace cbmc::arm
