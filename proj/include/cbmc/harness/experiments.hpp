#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cbmc/harness/metrics.hpp"

namespace cbmc::harness {

enum class ExperimentKind { train_cerebellum, load_sweep, resilience, ablation, single_run };

ExperimentKind kind_from_string(const std::string& name);
std::string to_string(ExperimentKind kind);

/// Total attached mass from `time` on.
struct LoadStep {
  double time = 0.0;  // s
  double mass = 0.0;  // kg
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::single_run;
  std::string name;
  std::vector<trajectories::CartesianTrajectorySpec> trajectories;
  std::vector<double> masses;    // load sweep
  std::vector<LoadStep> loads;   // resilience, ablation, single run
  Eigen::Vector3d load_offset = Eigen::Vector3d::Zero();
  double duration = 15.0;        // s per episode
  double steady_window = 3.0;    // s at the end of a run (sweep, ablation)
  double recovery_window = 3.0;  // s after each load event
  double smoothing = 0.05;       // s, moving average for peaks
  scheduler::PatternMode patterns = scheduler::PatternMode::blended;
  std::vector<scheduler::Ablations> ablations;  // ablation experiment; empty = all three
  int repetitions = 1;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::filesystem::path pattern_dir;  // cache of trained patterns; empty = output_dir/patterns

  void validate() const;
};

/// Trajectory entries are preset names, inline objects or JSON files
/// relative to `base_dir`. Output and pattern paths stay as written, i.e.
/// relative to the working directory.
ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::filesystem::path& base_dir,
                                     const std::string& origin = "<string>");
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Named trajectory presets: the three simulation references and T1..T8.
trajectories::CartesianTrajectorySpec trajectory_preset(const std::string& name);
std::vector<std::string> trajectory_preset_names();

std::string configuration_name(scheduler::PatternMode mode);
std::string configuration_name(const scheduler::Ablations& flags);
scheduler::Ablations ablation_from_string(const std::string& name);

struct LoadEventMetrics {
  double time = 0.0;
  double mass_before = 0.0, mass_after = 0.0;
  double plateau = 0.0;         // reference RMSE the event is measured against
  double peak = 0.0;            // max smoothed RMSE in the recovery window
  double excursion = 0.0;       // peak - plateau
  double recovery_time = -1.0;  // s after the event; negative when it never recovers
  int peaks = 0;                // detected peaks in the recovery window
};

/// One closed-loop episode.
struct RunSummary {
  std::string trajectory;
  std::string configuration;
  double mass = 0.0;  // kg at the end of the run
  int repetition = 0;
  double mean_rmse = 0.0;    // rad
  double window_rmse = 0.0;  // rad, mean over the steady window
  double mean_rmse_p = 0.0;  // m
  double mean_rmse_o = 0.0;  // rad
  double w2 = 0.0;           // heavy-pattern weight averaged over the steady window
  double kp_mean = 0.0, kp_std = 0.0, kv_mean = 0.0, kv_std = 0.0;
  double corr_kp_rmse = 0.0, corr_kv_rmse = 0.0;
};

/// Per configuration and mass, averaged over trajectories and repetitions.
struct AggregateRow {
  std::string configuration;
  double mass = 0.0;
  double rmse = 0.0;  // steady-window RMSE
  double w2 = 0.0;
  int peaks = -1;     // recovery-window peaks of the averaged series; -1 when not applicable
};

struct MetricsReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
  std::vector<RunSummary> runs;
  std::vector<AggregateRow> rows;
  std::vector<LoadEventMetrics> events;  // resilience, on the trajectory-averaged RMSE(t)
  std::vector<double> rmse_series;       // trajectory-averaged RMSE(t) of the main configuration
  double dt = 1e-3;
};

/// Everything an experiment needs besides its spec.
struct ExperimentContext {
  const arm::ArmModel* model = nullptr;
  const cerebellum::PatternSet* patterns = nullptr;
  scheduler::FrameworkConfig config;
  /// Called with every finished episode; the harness keeps only summaries.
  std::function<void(const std::string& label, const scheduler::RunLog&)> on_log;
  std::function<void(const std::string& message)> progress;
};

scheduler::LoadSchedule make_load_schedule(const std::vector<LoadStep>& loads, const Eigen::Vector3d& offset,
                                           double dt);

RunSummary summarize_run(const scheduler::RunLog& log, const arm::ArmModel& model, double steady_window);

/// Metrics of every load event after t = 0 against the median RMSE of the
/// `recovery_window` seconds before it; the t = 0 event is measured against
/// the plateau before the next event (or the end of the run). Recovery is
/// the first time the smoothed RMSE enters and stays within 2x plateau for 1 s.
std::vector<LoadEventMetrics> load_event_metrics(const std::vector<double>& rmse, double dt,
                                                 const std::vector<LoadStep>& loads, double recovery_window,
                                                 double smoothing);

/// Element-wise mean of equally long series.
std::vector<double> average_series(const std::vector<std::vector<double>>& series);

MetricsReport run_single(const ExperimentSpec& spec, const ExperimentContext& ctx);
MetricsReport run_load_sweep(const ExperimentSpec& spec, const ExperimentContext& ctx);
MetricsReport run_resilience(const ExperimentSpec& spec, const ExperimentContext& ctx);
MetricsReport run_ablation(const ExperimentSpec& spec, const ExperimentContext& ctx);

/// Trains the "light" or "heavy" pattern and saves it as <dir>/<which>.json.
cerebellum::CerebellumNet train_pattern_file(const arm::ArmModel& model, const std::string& which,
                                             const std::filesystem::path& dir, std::uint64_t seed,
                                             const std::function<void(const std::string&)>& progress = {});

/// Loads light.json / heavy.json from `dir`, training and saving any that
/// are missing.
cerebellum::PatternSet obtain_patterns(const arm::ArmModel& model, const std::filesystem::path& dir,
                                       std::uint64_t seed,
                                       const std::function<void(const std::string&)>& progress = {});

}  // namespace cbmc::harness
