#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "cbmc/brainstem.hpp"
#include "cbmc/cerebellum.hpp"
#include "cbmc/spinal.hpp"
#include "cbmc/thalamus.hpp"
#include "cbmc/trajectories.hpp"

namespace cbmc::scheduler {

struct Ablations {
  bool freeze_brainstem = false;         // gains fixed at their initial value
  bool freeze_thalamus = false;          // pattern weights fixed at their initial value
  bool fixed_cerebellum_torque = false;  // both columns = light output at the start pose
};

/// Which motor patterns feed the thalamic blend.
enum class PatternMode { blended, light_only, heavy_only };

struct FrameworkConfig {
  int T1 = 1;  // ticks
  int T2 = 10;
  int T3 = 50;
  double dt = 1e-3;  // s
  std::uint64_t seed = 1;
  Ablations ablations;
  PatternMode patterns = PatternMode::blended;
  brainstem::GainLimits gain_limits;
  spinal::EncodingParams encoding;
  arm::SensorNoise sensor_noise;
  arm::WrenchMode wrench_mode = arm::WrenchMode::full;

  void validate() const;
};

FrameworkConfig apply_ablation(FrameworkConfig config, const Ablations& flags);

struct Subthreads {
  bool spinal = false;
  bool brainstem = false;
  bool thalamus = false;
  bool cerebellum = false;
};

/// Sub-threads due at tick t (ticks count from 1).
Subthreads due_subthreads(const FrameworkConfig& config, std::uint64_t tick);

struct LoadEvent {
  std::uint64_t tick = 0;  // applied after the plant step of this tick; 0 = before the run
  double mass = 0.0;       // total attached mass from then on, kg
};

struct LoadSchedule {
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  std::vector<LoadEvent> events;

  double mass_at_start() const;
  void validate() const;
};

/// Latest-value snapshot exchanged between the control levels. Every field is
/// stamped with the tick that last wrote it.
struct BusSnapshot {
  JointVectord q_d, qd_d, q, qd;
  arm::Wrench wrench;
  brainstem::Gains gains;
  JointVectord tau_g = JointVectord::Zero();
  CompensationMatrixd T_cb = CompensationMatrixd::Zero();
  JointVectord tau = JointVectord::Zero();
  Eigen::Vector2d weights = Eigen::Vector2d::Constant(0.5);
  std::uint64_t gains_tick = 0, tau_g_tick = 0, T_cb_tick = 0, tau_tick = 0, state_tick = 0;
};

/// Single-writer-per-field bus; reads copy a whole snapshot.
class SharedBus {
 public:
  BusSnapshot read() const { return snap_; }
  void publish_state(std::uint64_t tick, const JointVectord& q_d, const JointVectord& qd_d,
                     const arm::JointState& s, const arm::Wrench& w);
  void publish_gains(std::uint64_t tick, const brainstem::Gains& g);
  void publish_compensation(std::uint64_t tick, const JointVectord& tau_g, const Eigen::Vector2d& w);
  void publish_patterns(std::uint64_t tick, const CompensationMatrixd& T_cb);
  void publish_torque(std::uint64_t tick, const JointVectord& tau);

 private:
  BusSnapshot snap_;
};

struct TickRecord {
  std::uint64_t tick = 0;
  double time = 0.0;  // s, after the plant step
  JointVectord q_d, qd_d, q, qd, tau, tau_g, kp, kv;
  Eigen::Vector2d weights;
  CompensationMatrixd T_cb;
  Eigen::Matrix<double, 6, 1> wrench;
  double load_mass = 0.0;
  double brainstem_loss = 0.0;
  double thalamus_loss = 0.0;
  Subthreads ran;
};

struct RunLog {
  double dt = 1e-3;
  std::vector<TickRecord> records;
  double mean_tick_seconds = 0.0;    // wall clock per tick, all sub-threads and the plant step
  double mean_spinal_seconds = 0.0;  // wall clock per spinal_step

  std::size_t size() const { return records.size(); }
};

/// Trainable and fixed parts of the framework for one episode.
struct Modules {
  const cerebellum::PatternSet* patterns = nullptr;
  brainstem::BrainstemNet brainstem;
  thalamus::ThalamusNet thalamus;

  /// Fresh brainstem and thalamus nets seeded from `seed`.
  static Modules create(const cerebellum::PatternSet& patterns, std::uint64_t seed);
};

struct EpisodeOptions {
  bool measure_time = false;
};

/// Runs one episode of trajectory.size() ticks. The arm starts on the first
/// trajectory sample. Before tick 1 the brainstem, cerebellum and thalamus
/// run once to initialize the gains, T_cb and the pattern weights; the
/// thalamic filter (tau_g) and the spinal neurons (tau) start at rest.
RunLog run_episode(const FrameworkConfig& config, const arm::ArmModel& model, const LoadSchedule& load_schedule,
                   const trajectories::JointTrajectory& trajectory, Modules& modules,
                   const EpisodeOptions& options = {});

}  // namespace cbmc::scheduler
