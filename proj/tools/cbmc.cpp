#include <CLI11.hpp>
#include <iostream>

#include "cbmc/harness/export.hpp"

using namespace cbmc;

namespace {

struct Common {
  std::string model;
  std::string out;
  std::string patterns;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;
  bool logs = false;
};

void say(const Common& c, const std::string& msg) {
  if (!c.quiet) std::cerr << msg << '\n';
}

arm::ArmModel model_of(const Common& c) {
  return arm::load_model(c.model.empty() ? arm::default_model_path() : std::filesystem::path(c.model));
}

harness::ExperimentSpec spec_of(const Common& c, const std::string& path, harness::ExperimentKind expected) {
  auto spec = harness::load_experiment_spec(path);
  if (expected != harness::ExperimentKind::single_run && spec.kind != expected &&
      spec.kind != harness::ExperimentKind::single_run)
    throw Error(path + ": experiment is '" + harness::to_string(spec.kind) + "', expected '" +
                harness::to_string(expected) + "'");
  spec.kind = expected;
  if (c.seed_set) spec.seed = c.seed;
  if (!c.out.empty()) spec.output_dir = c.out;
  if (!c.patterns.empty()) spec.pattern_dir = c.patterns;
  if (spec.pattern_dir.empty()) spec.pattern_dir = spec.output_dir / "patterns";
  return spec;
}

void print_report(const harness::MetricsReport& rep) {
  std::cout << "configuration,mass,rmse,w2,peaks\n";
  for (const auto& r : rep.rows)
    std::cout << r.configuration << ',' << r.mass << ',' << r.rmse << ',' << r.w2 << ',' << r.peaks << '\n';
  if (!rep.events.empty()) {
    std::cout << "event_time,mass_after,plateau,peak,excursion,recovery_time,peaks\n";
    for (const auto& e : rep.events)
      std::cout << e.time << ',' << e.mass_after << ',' << e.plateau << ',' << e.peak << ',' << e.excursion << ','
                << e.recovery_time << ',' << e.peaks << '\n';
  }
}

int run_experiment(const Common& c, const std::string& spec_path, harness::ExperimentKind kind,
                   const std::vector<std::string>& flags) {
  auto spec = spec_of(c, spec_path, kind);
  if (!flags.empty()) {
    spec.ablations.clear();
    for (const auto& f : flags) spec.ablations.push_back(harness::ablation_from_string(f));
  }
  const auto model = model_of(c);
  const auto patterns = harness::obtain_patterns(model, spec.pattern_dir, spec.seed, [&](auto& m) { say(c, m); });

  const std::string stem = spec.name + "-" + std::to_string(spec.seed);
  const bool keep_logs = c.logs || kind != harness::ExperimentKind::load_sweep;
  harness::ExperimentContext ctx;
  ctx.model = &model;
  ctx.patterns = &patterns;
  ctx.progress = [&](const std::string& m) { say(c, m); };
  ctx.on_log = [&](const std::string& label, const scheduler::RunLog& log) {
    if (!keep_logs) return;
    const auto dir = spec.output_dir / (stem + "-logs");
    harness::write_log_csv(log, dir / (label + ".csv"));
    harness::write_log_plots(log, dir, label);
  };

  harness::MetricsReport rep;
  switch (kind) {
    case harness::ExperimentKind::load_sweep: rep = harness::run_load_sweep(spec, ctx); break;
    case harness::ExperimentKind::resilience: rep = harness::run_resilience(spec, ctx); break;
    case harness::ExperimentKind::ablation: rep = harness::run_ablation(spec, ctx); break;
    default: rep = harness::run_single(spec, ctx); break;
  }

  for (const auto& f : harness::write_report_csv(rep, spec.output_dir, stem)) say(c, "wrote " + f.string());
  if (!rep.rmse_series.empty())
    harness::write_text(spec.output_dir / (stem + "-rmse.svg"),
                        harness::svg_line_plot(spec.name + ": mean joint RMSE", "time (s)", "rad", 0.0, rep.dt,
                                               {{"RMSE", rep.rmse_series}}));
  if (kind == harness::ExperimentKind::load_sweep && rep.rows.size() >= 3) {
    std::vector<harness::PlotSeries> rmse{{"light-only", {}}, {"heavy-only", {}}, {"blended", {}}};
    harness::PlotSeries w2{"w2 (blended)", {}};
    for (const auto& r : rep.rows) {
      for (auto& s : rmse)
        if (s.name == r.configuration) s.values.push_back(r.rmse);
      if (r.configuration == "blended") w2.values.push_back(r.w2);
    }
    const double m0 = spec.masses.front();
    const double dm = spec.masses.size() > 1 ? spec.masses[1] - spec.masses[0] : 1.0;
    harness::write_text(spec.output_dir / (stem + "-rmse.svg"),
                        harness::svg_line_plot(spec.name + ": steady RMSE", "load mass (kg)", "rad", m0, dm, rmse));
    harness::write_text(spec.output_dir / (stem + "-weights.svg"),
                        harness::svg_line_plot(spec.name + ": heavy-pattern weight", "load mass (kg)", "w2", m0,
                                               dm, {w2}));
  }
  print_report(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spiking motion-control framework: pattern training and closed-loop experiments"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--model", c.model, "Arm model JSON (default: shipped model)");
  app.add_option("--out", c.out, "Output directory (overrides the spec)");
  app.add_option("--patterns", c.patterns, "Directory of trained patterns (default: <out>/patterns)");
  auto* seed_opt = app.add_option("--seed", c.seed, "Seed (overrides the spec)");
  app.add_flag("--quiet", c.quiet, "No progress on stderr");
  app.add_flag("--logs", c.logs, "Also write per-episode logs for load sweeps");

  std::string which = "both";
  auto* train = app.add_subcommand("train", "Train motor patterns and save them under --out");
  train->add_option("--pattern", which, "light, heavy or both")->check(CLI::IsMember({"light", "heavy", "both"}));

  std::string spec_path;
  std::vector<std::string> flags;
  auto* run = app.add_subcommand("run", "Single run from an experiment spec");
  auto* sweep = app.add_subcommand("sweep", "Load sweep over masses and pattern configurations");
  auto* resilience = app.add_subcommand("resilience", "Load-event resilience run");
  auto* ablate = app.add_subcommand("ablate", "Ablation comparison");
  for (auto* sub : {run, sweep, resilience, ablate})
    sub->add_option("--spec", spec_path, "Experiment spec JSON")->required()->check(CLI::ExistingFile);
  ablate->add_option("--flags", flags, "Ablations: freeze-brainstem, freeze-thalamus, fixed-cerebellum-torque")
      ->delimiter(',');

  std::string traj_name, traj_out;
  double traj_duration = 0.0;
  auto* plan = app.add_subcommand("plan", "Plan a joint trajectory and write it as CSV");
  plan->add_option("--trajectory", traj_name, "Preset name or trajectory JSON")->required();
  plan->add_option("--duration", traj_duration, "Seconds (default: one period)");
  plan->add_option("--file", traj_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);
  c.seed_set = seed_opt->count() > 0;

  try {
    if (*train) {
      const auto model = model_of(c);
      const std::filesystem::path dir = c.out.empty() ? "patterns" : c.out;
      const std::uint64_t seed = c.seed_set ? c.seed : 1;
      for (const char* p : {"light", "heavy"})
        if (which == "both" || which == p) {
          harness::train_pattern_file(model, p, dir, seed, [&](auto& m) { say(c, m); });
          say(c, "wrote " + (dir / (std::string(p) + ".json")).string());
        }
      return 0;
    }
    if (*plan) {
      const auto model = model_of(c);
      const auto spec = std::filesystem::path(traj_name).extension() == ".json"
                            ? trajectories::load_trajectory_spec(traj_name)
                            : harness::trajectory_preset(traj_name);
      const auto traj = trajectories::plan_joint_trajectory(model, spec, 1e-3, traj_duration);
      trajectories::save_trajectory_csv(traj, traj_out);
      say(c, "wrote " + traj_out + " (" + std::to_string(traj.size()) + " samples)");
      return 0;
    }
    if (*run) return run_experiment(c, spec_path, harness::ExperimentKind::single_run, {});
    if (*sweep) return run_experiment(c, spec_path, harness::ExperimentKind::load_sweep, {});
    if (*resilience) return run_experiment(c, spec_path, harness::ExperimentKind::resilience, {});
    if (*ablate) return run_experiment(c, spec_path, harness::ExperimentKind::ablation, flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
