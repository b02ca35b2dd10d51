#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "cbmc/arm/dynamics.hpp"
#include "cbmc/snn/network.hpp"
#include "cbmc/trajectories.hpp"

namespace cbmc::cerebellum {

inline constexpr int kWindow = 10;
inline constexpr Eigen::Index kGranule = 300;
inline constexpr Eigen::Index kPurkinje = 200;
inline constexpr Eigen::Index kNuclei = 140;
inline constexpr Eigen::Index kGroup = kNuclei / kJoints;  // 20 DCN neurons per joint

/// MF(7) -> GC(300) -> PC(200, fed [GC(t), GC(t-1)]) -> DCN(140, non-spiking).
snn::Topology topology();

struct CerebellumNet {
  snn::SpikingNetworkd network;
  bool trained = false;
  double load_mass = 0.0;  // kg, the pattern this net was trained for

  /// Fresh network with seeded uniform weights.
  static CerebellumNet create(std::uint64_t seed);
};

/// Positions normalized to [-1, 1] by the joint limits (clamped); the same
/// current is injected on each MF channel for the whole window.
JointVectord encode_positions(const JointVectord& q, const arm::ArmModel& model);

/// Mean of each group of 20 DCN potentials: (140 x B) -> (7 x B).
Eigen::MatrixXd decode_groups(const Eigen::MatrixXd& dcn);

/// Batched forward pass without the trained check; columns of `q` are configurations.
Eigen::MatrixXd forward(const CerebellumNet& net, const arm::ArmModel& model, const Eigen::MatrixXd& q);

JointVectord predict(const CerebellumNet& net, const arm::ArmModel& model, const JointVectord& q);

struct TrainingOptions {
  int epochs = 50;
  int batch = 10;
  double lr = 0.01;
  double momentum = 0.5;
  double noise_sigma = 1.0;  // N*m, added to every reference torque
  std::uint64_t seed = 7;
};

struct TrainingReport {
  std::vector<double> epoch_loss;  // mean batch MSE per epoch
};

using EpochCallback = std::function<void(int epoch, double loss)>;

/// Supervised training against gravity_torque(q_d, load). Every epoch walks
/// each trajectory in order in batches of consecutive samples.
TrainingReport train_pattern(CerebellumNet& net, const arm::ArmModel& model,
                             const std::vector<trajectories::JointTrajectory>& data, const arm::LoadSpec& load,
                             const TrainingOptions& options = {}, const EpochCallback& on_epoch = {});

struct PatternSet {
  CerebellumNet light;
  CerebellumNet heavy;
  double light_mass = 0.0;
  double heavy_mass = 3.0;

  void validate() const;
};

CompensationMatrixd predict_matrix(const PatternSet& patterns, const arm::ArmModel& model, const JointVectord& q);

/// The two circles every pattern is trained on, planned at 1 ms.
std::vector<trajectories::JointTrajectory> training_trajectories(const arm::ArmModel& model);

void save_pattern(const CerebellumNet& net, const std::filesystem::path& path);
CerebellumNet load_pattern(const std::filesystem::path& path);

}  // namespace cbmc::cerebellum
