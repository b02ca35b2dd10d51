#include "cbmc/harness/experiments.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "cbmc/arm/dynamics.hpp"

namespace cbmc::harness {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

std::size_t ticks_for(double seconds, double dt) { return static_cast<std::size_t>(std::llround(seconds / dt)); }

trajectories::CartesianTrajectorySpec make(const std::string& name, trajectories::Family family,
                                           Eigen::Vector3d center, double radius, double period, double theta = 0.0,
                                           double phi = 0.0, double secondary = -1.0) {
  trajectories::CartesianTrajectorySpec s;
  s.name = name;
  s.family = family;
  s.center = center;
  s.radius = radius;
  s.secondary_radius = secondary > 0.0 ? secondary : radius;
  s.period = period;
  s.theta = theta;
  s.phi = phi;
  return s;
}

}  // namespace

ExperimentKind kind_from_string(const std::string& name) {
  if (name == "train-cerebellum") return ExperimentKind::train_cerebellum;
  if (name == "load-sweep") return ExperimentKind::load_sweep;
  if (name == "resilience") return ExperimentKind::resilience;
  if (name == "ablation") return ExperimentKind::ablation;
  if (name == "single-run") return ExperimentKind::single_run;
  throw Error("unknown experiment kind '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::train_cerebellum: return "train-cerebellum";
    case ExperimentKind::load_sweep: return "load-sweep";
    case ExperimentKind::resilience: return "resilience";
    case ExperimentKind::ablation: return "ablation";
    case ExperimentKind::single_run: return "single-run";
  }
  return "?";
}

trajectories::CartesianTrajectorySpec trajectory_preset(const std::string& name) {
  using trajectories::Family;
  if (name == "horizontal-circle") return trajectories::training_horizontal_circle();
  if (name == "inclined-circle") return trajectories::training_inclined_circle();
  if (name == "figure-eight") return trajectories::figure_eight();
  if (name == "T1") return make("T1", Family::horizontal_circle, {0.54, 0.0, 0.45}, 0.14, 4.0);
  if (name == "T2") return make("T2", Family::vertical_circle, {0.6, 0.35, 0.0}, 0.2, 4.0);
  if (name == "T3") return make("T3", Family::inclined_circle, {0.63, -0.11, 0.3}, 0.14, 4.0, -kPi / 6.0);
  if (name == "T4") return make("T4", Family::figure_eight, {0.0, 0.61, 0.3}, 0.14, 4.0);
  if (name == "T5") return make("T5", Family::figure_eight, {0.0, 0.61, 0.3}, 0.14, 3.0);
  if (name == "T6") return make("T6", Family::inclined_circle, {0.63, -0.11, 0.3}, 0.14, 2.0, -kPi / 6.0);
  if (name == "T7") return make("T7", Family::inclined_circle, {0.53, -0.11, 0.4}, 0.2, 3.0, kPi / 6.0);
  if (name == "T8")
    return make("T8", Family::tilted_rotated_circle, {0.53, -0.11, 0.4}, 0.2, 3.0, kPi / 6.0, kPi / 3.0, 0.2);
  throw Error("unknown trajectory preset '" + name + "'");
}

std::vector<std::string> trajectory_preset_names() {
  return {"horizontal-circle", "inclined-circle", "figure-eight", "T1", "T2", "T3", "T4", "T5", "T6", "T7", "T8"};
}

std::string configuration_name(scheduler::PatternMode mode) {
  switch (mode) {
    case scheduler::PatternMode::blended: return "blended";
    case scheduler::PatternMode::light_only: return "light-only";
    case scheduler::PatternMode::heavy_only: return "heavy-only";
  }
  return "?";
}

std::string configuration_name(const scheduler::Ablations& f) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += "+";
    s += name;
  };
  add(f.freeze_brainstem, "freeze-brainstem");
  add(f.freeze_thalamus, "freeze-thalamus");
  add(f.fixed_cerebellum_torque, "fixed-cerebellum-torque");
  return s.empty() ? "full" : s;
}

scheduler::Ablations ablation_from_string(const std::string& name) {
  scheduler::Ablations f;
  std::stringstream ss(name);
  std::string part;
  while (std::getline(ss, part, '+')) {
    if (part == "freeze-brainstem") f.freeze_brainstem = true;
    else if (part == "freeze-thalamus") f.freeze_thalamus = true;
    else if (part == "fixed-cerebellum-torque") f.fixed_cerebellum_torque = true;
    else if (part != "full" && !part.empty()) throw Error("unknown ablation '" + part + "'");
  }
  return f;
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) throw Error("experiment spec: repetitions must be >= 1");
  if (kind != ExperimentKind::train_cerebellum && trajectories.empty())
    throw Error("experiment spec: at least one trajectory is required");
  if (!(duration > 0.0)) throw Error("experiment spec: duration must be positive");
  if (!(steady_window > 0.0) || steady_window > duration)
    throw Error("experiment spec: steady_window must be in (0, duration]");
  if (!(recovery_window > 0.0)) throw Error("experiment spec: recovery_window must be positive");
  if (!(smoothing > 0.0)) throw Error("experiment spec: smoothing must be positive");
  if (kind == ExperimentKind::load_sweep && masses.empty()) throw Error("experiment spec: load sweep needs masses");
  for (double m : masses)
    if (!(m >= 0.0)) throw Error("experiment spec: masses must be non-negative");
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (!(loads[i].mass >= 0.0) || !(loads[i].time >= 0.0))
      throw Error("experiment spec: load steps need time >= 0 and mass >= 0");
    if (i > 0 && loads[i].time <= loads[i - 1].time) throw Error("experiment spec: load steps must be increasing in time");
  }
  for (const auto& t : trajectories) t.validate();
}

ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::filesystem::path& base_dir,
                                     const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(origin + ": " + e.what());
  }
  auto fail = [&](const std::string& field, const std::string& what) -> void {
    throw Error(origin + ": field '" + field + "': " + what);
  };
  auto number = [&](const json& node, const std::string& field) {
    if (!node.is_number()) fail(field, "expected a number");
    return node.get<double>();
  };

  ExperimentSpec s;
  if (!doc.is_object()) fail("<root>", "expected an object");
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) fail("experiment", "missing or not a string");
  try {
    s.kind = kind_from_string(doc["experiment"].get<std::string>());
  } catch (const Error& e) {
    fail("experiment", e.what());
  }
  s.name = doc.value("name", to_string(s.kind));

  if (doc.contains("trajectories")) {
    if (!doc["trajectories"].is_array()) fail("trajectories", "expected an array");
    for (std::size_t i = 0; i < doc["trajectories"].size(); ++i) {
      const json& t = doc["trajectories"][i];
      const std::string field = "trajectories[" + std::to_string(i) + "]";
      if (t.is_object()) {
        s.trajectories.push_back(trajectories::parse_trajectory_spec(t.dump(), origin + ": " + field));
      } else if (t.is_string()) {
        const std::string ref = t.get<std::string>();
        if (std::filesystem::path(ref).extension() == ".json") {
          const auto path = base_dir / ref;
          if (!std::filesystem::exists(path)) fail(field, "file not found: " + path.string());
          s.trajectories.push_back(trajectories::load_trajectory_spec(path));
        } else {
          try {
            s.trajectories.push_back(trajectory_preset(ref));
          } catch (const Error& e) {
            fail(field, e.what());
          }
        }
      } else {
        fail(field, "expected a preset name, a file name or an object");
      }
    }
  }
  if (doc.contains("masses")) {
    if (!doc["masses"].is_array()) fail("masses", "expected an array");
    for (const auto& m : doc["masses"]) s.masses.push_back(number(m, "masses"));
  }
  if (doc.contains("loads")) {
    if (!doc["loads"].is_array()) fail("loads", "expected an array");
    for (std::size_t i = 0; i < doc["loads"].size(); ++i) {
      const json& l = doc["loads"][i];
      const std::string field = "loads[" + std::to_string(i) + "]";
      if (!l.is_object() || !l.contains("time") || !l.contains("mass")) fail(field, "expected {time, mass}");
      s.loads.push_back({number(l["time"], field + ".time"), number(l["mass"], field + ".mass")});
    }
  }
  if (doc.contains("load_offset")) {
    const json& o = doc["load_offset"];
    if (!o.is_array() || o.size() != 3) fail("load_offset", "expected an array of 3 numbers");
    for (int i = 0; i < 3; ++i) s.load_offset[i] = number(o[i], "load_offset");
  }
  auto opt_number = [&](const char* key, double& out) {
    if (doc.contains(key)) out = number(doc[key], key);
  };
  opt_number("duration", s.duration);
  opt_number("steady_window", s.steady_window);
  opt_number("recovery_window", s.recovery_window);
  opt_number("smoothing", s.smoothing);
  if (doc.contains("patterns")) {
    const std::string p = doc["patterns"].is_string() ? doc["patterns"].get<std::string>() : "";
    if (p == "blended") s.patterns = scheduler::PatternMode::blended;
    else if (p == "light-only") s.patterns = scheduler::PatternMode::light_only;
    else if (p == "heavy-only") s.patterns = scheduler::PatternMode::heavy_only;
    else fail("patterns", "expected blended, light-only or heavy-only");
  }
  if (doc.contains("ablations")) {
    if (!doc["ablations"].is_array()) fail("ablations", "expected an array");
    for (const auto& a : doc["ablations"]) {
      if (!a.is_string()) fail("ablations", "expected strings");
      try {
        s.ablations.push_back(ablation_from_string(a.get<std::string>()));
      } catch (const Error& e) {
        fail("ablations", e.what());
      }
    }
  }
  if (doc.contains("repetitions")) {
    if (!doc["repetitions"].is_number_integer()) fail("repetitions", "expected an integer");
    s.repetitions = doc["repetitions"].get<int>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) fail("output", "expected a string");
    s.output_dir = doc["output"].get<std::string>();
  }
  if (doc.contains("pattern_dir")) {
    if (!doc["pattern_dir"].is_string()) fail("pattern_dir", "expected a string");
    s.pattern_dir = doc["pattern_dir"].get<std::string>();
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(origin + ": " + e.what());
  }
  return s;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment spec " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_spec(ss.str(), path.parent_path(), path.string());
}

scheduler::LoadSchedule make_load_schedule(const std::vector<LoadStep>& loads, const Eigen::Vector3d& offset,
                                           double dt) {
  scheduler::LoadSchedule ls;
  ls.offset = offset;
  for (const auto& l : loads) ls.events.push_back({ticks_for(l.time, dt), l.mass});
  ls.validate();
  return ls;
}

RunSummary summarize_run(const scheduler::RunLog& log, const arm::ArmModel& model, double steady_window) {
  if (log.size() < 2) throw Error("summarize_run: log too short");
  RunSummary r;
  const Series rmse = joint_rmse(log);
  const CartesianErrors cart = cartesian_rmse(log, model);
  const std::size_t n = log.size();
  const std::size_t from = n - std::min(n, std::max<std::size_t>(1, ticks_for(steady_window, log.dt)));
  r.mean_rmse = rmse.mean;
  r.window_rmse = mean_of(rmse.values, from, n);
  r.mean_rmse_p = cart.position.mean;
  r.mean_rmse_o = cart.orientation.mean;
  r.mass = log.records.back().load_mass;

  std::vector<double> kp(n), kv(n), w2(n);
  for (std::size_t i = 0; i < n; ++i) {
    kp[i] = log.records[i].kp.mean();
    kv[i] = log.records[i].kv.mean();
    w2[i] = log.records[i].weights[1];
  }
  auto stdev = [&](const std::vector<double>& x, double m) {
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size()));
  };
  r.kp_mean = mean_of(kp, 0, n);
  r.kv_mean = mean_of(kv, 0, n);
  r.kp_std = stdev(kp, r.kp_mean);
  r.kv_std = stdev(kv, r.kv_mean);
  r.corr_kp_rmse = correlation(kp, rmse.values);
  r.corr_kv_rmse = correlation(kv, rmse.values);
  r.w2 = mean_of(w2, from, n);
  return r;
}

std::vector<LoadEventMetrics> load_event_metrics(const std::vector<double>& rmse, double dt,
                                                 const std::vector<LoadStep>& loads, double recovery_window,
                                                 double smoothing) {
  std::vector<LoadEventMetrics> out;
  const std::vector<double> smooth = moving_average(rmse, std::max<std::size_t>(1, ticks_for(smoothing, dt)));
  const std::size_t n = rmse.size();
  const std::size_t span = std::max<std::size_t>(1, ticks_for(recovery_window, dt));
  const std::size_t dwell = ticks_for(1.0, dt);
  for (std::size_t e = 0; e < loads.size(); ++e) {
    const std::size_t at = ticks_for(loads[e].time, dt);
    if (at >= n) break;
    const std::size_t next = e + 1 < loads.size() ? std::min(n, ticks_for(loads[e + 1].time, dt)) : n;
    LoadEventMetrics m;
    m.time = loads[e].time;
    m.mass_before = e > 0 ? loads[e - 1].mass : 0.0;
    m.mass_after = loads[e].mass;
    if (at == 0)
      m.plateau = median_of(smooth, next - std::min(next, span), next);
    else
      m.plateau = median_of(smooth, at - std::min(at, span), at);
    const std::size_t stop = std::min(next, at + span);
    m.peak = *std::max_element(smooth.begin() + static_cast<std::ptrdiff_t>(at),
                               smooth.begin() + static_cast<std::ptrdiff_t>(stop));
    m.excursion = m.peak - m.plateau;
    m.peaks = static_cast<int>(detect_peaks(smooth, at, stop).size());
    if (auto k = settle_index(smooth, at, next, 2.0 * m.plateau, dwell))
      m.recovery_time = static_cast<double>(*k - at) * dt;
    out.push_back(m);
  }
  return out;
}

std::vector<double> average_series(const std::vector<std::vector<double>>& series) {
  if (series.empty()) return {};
  std::vector<double> out(series.front().size(), 0.0);
  for (const auto& s : series) {
    if (s.size() != out.size()) throw Error("average_series: length mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) out[i] += s[i];
  }
  for (double& v : out) v /= static_cast<double>(series.size());
  return out;
}

namespace {

struct Runner {
  const ExperimentSpec& spec;
  const ExperimentContext& ctx;
  std::vector<trajectories::JointTrajectory> planned;

  Runner(const ExperimentSpec& s, const ExperimentContext& c) : spec(s), ctx(c) {
    if (!ctx.model || !ctx.patterns) throw Error("experiment context needs a model and patterns");
    spec.validate();
    for (const auto& t : spec.trajectories) {
      say("planning " + t.name);
      planned.push_back(trajectories::plan_joint_trajectory(*ctx.model, t, ctx.config.dt, spec.duration));
    }
  }

  void say(const std::string& msg) const {
    if (ctx.progress) ctx.progress(msg);
  }

  /// One episode; returns its summary and RMSE(t).
  std::pair<RunSummary, std::vector<double>> episode(std::size_t traj, scheduler::FrameworkConfig config,
                                                      const std::vector<LoadStep>& loads, int rep,
                                                      const std::string& configuration) const {
    config.seed = spec.seed + static_cast<std::uint64_t>(rep);
    auto modules = scheduler::Modules::create(*ctx.patterns, config.seed);
    const auto schedule = make_load_schedule(loads, spec.load_offset, config.dt);
    const auto log = scheduler::run_episode(config, *ctx.model, schedule, planned[traj], modules);
    RunSummary r = summarize_run(log, *ctx.model, spec.steady_window);
    r.trajectory = spec.trajectories[traj].name;
    r.configuration = configuration;
    r.repetition = rep;
    std::ostringstream label;
    label << r.trajectory << "-" << configuration << "-" << r.mass << "kg-r" << rep;
    say(label.str() + ": rmse " + std::to_string(r.window_rmse));
    if (ctx.on_log) ctx.on_log(label.str(), log);
    return {r, joint_rmse(log).values};
  }

  MetricsReport report() const {
    MetricsReport rep;
    rep.experiment = spec.name;
    rep.seed = spec.seed;
    rep.dt = ctx.config.dt;
    rep.metadata["kind"] = to_string(spec.kind);
    rep.metadata["duration"] = std::to_string(spec.duration);
    rep.metadata["repetitions"] = std::to_string(spec.repetitions);
    std::string names;
    for (const auto& t : spec.trajectories) names += (names.empty() ? "" : ";") + t.name;
    rep.metadata["trajectories"] = names;
    rep.metadata["ablation"] = configuration_name(ctx.config.ablations);
    return rep;
  }

  /// Runs one configuration on every trajectory and repetition; returns the
  /// averaged RMSE(t).
  std::vector<double> sweep_configuration(MetricsReport& rep, const scheduler::FrameworkConfig& config,
                                          const std::vector<LoadStep>& loads, const std::string& name) const {
    std::vector<std::vector<double>> all;
    for (int r = 0; r < spec.repetitions; ++r)
      for (std::size_t t = 0; t < planned.size(); ++t) {
        auto [summary, series] = episode(t, config, loads, r, name);
        rep.runs.push_back(summary);
        all.push_back(std::move(series));
      }
    return average_series(all);
  }

  AggregateRow aggregate(const MetricsReport& rep, const std::string& configuration, double mass) const {
    AggregateRow row;
    row.configuration = configuration;
    row.mass = mass;
    int n = 0;
    for (const auto& r : rep.runs)
      if (r.configuration == configuration && r.mass == mass) {
        row.rmse += r.window_rmse;
        row.w2 += r.w2;
        ++n;
      }
    if (n > 0) {
      row.rmse /= n;
      row.w2 /= n;
    }
    return row;
  }

  int first_window_peaks(const std::vector<double>& rmse) const {
    const auto smooth = moving_average(rmse, std::max<std::size_t>(1, ticks_for(spec.smoothing, ctx.config.dt)));
    return static_cast<int>(detect_peaks(smooth, 0, ticks_for(spec.recovery_window, ctx.config.dt)).size());
  }
};

}  // namespace

MetricsReport run_single(const ExperimentSpec& spec, const ExperimentContext& ctx) {
  Runner run(spec, ctx);
  MetricsReport rep = run.report();
  scheduler::FrameworkConfig config = ctx.config;
  config.patterns = spec.patterns;
  if (!spec.ablations.empty()) config = scheduler::apply_ablation(config, spec.ablations.front());
  rep.metadata["ablation"] = configuration_name(config.ablations);
  const std::string name = config.ablations.freeze_brainstem || config.ablations.freeze_thalamus ||
                                   config.ablations.fixed_cerebellum_torque
                               ? configuration_name(config.ablations)
                               : configuration_name(spec.patterns);
  rep.rmse_series = run.sweep_configuration(rep, config, spec.loads, name);
  const double mass = spec.loads.empty() ? 0.0 : spec.loads.back().mass;
  AggregateRow row = run.aggregate(rep, name, mass);
  row.peaks = run.first_window_peaks(rep.rmse_series);
  rep.rows.push_back(row);
  rep.events = load_event_metrics(rep.rmse_series, ctx.config.dt, spec.loads, spec.recovery_window, spec.smoothing);
  return rep;
}

MetricsReport run_load_sweep(const ExperimentSpec& spec, const ExperimentContext& ctx) {
  Runner run(spec, ctx);
  MetricsReport rep = run.report();
  const scheduler::PatternMode modes[] = {scheduler::PatternMode::light_only, scheduler::PatternMode::heavy_only,
                                          scheduler::PatternMode::blended};
  for (double mass : spec.masses) {
    for (auto mode : modes) {
      scheduler::FrameworkConfig config = ctx.config;
      config.patterns = mode;
      run.sweep_configuration(rep, config, {{0.0, mass}}, configuration_name(mode));
      rep.rows.push_back(run.aggregate(rep, configuration_name(mode), mass));
    }
  }
  return rep;
}

MetricsReport run_resilience(const ExperimentSpec& spec, const ExperimentContext& ctx) {
  Runner run(spec, ctx);
  MetricsReport rep = run.report();
  scheduler::FrameworkConfig config = ctx.config;
  config.patterns = scheduler::PatternMode::blended;
  const std::string name = configuration_name(config.ablations);
  rep.rmse_series = run.sweep_configuration(rep, config, spec.loads, name);
  rep.events = load_event_metrics(rep.rmse_series, ctx.config.dt, spec.loads, spec.recovery_window, spec.smoothing);
  const double mass = spec.loads.empty() ? 0.0 : spec.loads.back().mass;
  AggregateRow row = run.aggregate(rep, name, mass);
  row.peaks = rep.events.empty() ? -1 : rep.events.front().peaks;
  rep.rows.push_back(row);
  return rep;
}

MetricsReport run_ablation(const ExperimentSpec& spec, const ExperimentContext& ctx) {
  Runner run(spec, ctx);
  MetricsReport rep = run.report();
  std::vector<scheduler::Ablations> variants{scheduler::Ablations{}};
  if (spec.ablations.empty()) {
    variants.push_back({true, false, false});
    variants.push_back({false, true, false});
    variants.push_back({false, false, true});
  } else {
    variants.insert(variants.end(), spec.ablations.begin(), spec.ablations.end());
  }
  std::string flags;
  for (std::size_t i = 1; i < variants.size(); ++i)
    flags += (flags.empty() ? "" : ";") + configuration_name(variants[i]);
  rep.metadata["ablations"] = flags;
  const double mass = spec.loads.empty() ? 0.0 : spec.loads.back().mass;
  for (const auto& flagset : variants) {
    scheduler::FrameworkConfig config = scheduler::apply_ablation(ctx.config, flagset);
    config.patterns = scheduler::PatternMode::blended;
    const std::string name = configuration_name(flagset);
    auto series = run.sweep_configuration(rep, config, spec.loads, name);
    AggregateRow row = run.aggregate(rep, name, mass);
    row.peaks = run.first_window_peaks(series);
    rep.rows.push_back(row);
    if (rep.rmse_series.empty()) rep.rmse_series = std::move(series);
  }
  return rep;
}

cerebellum::CerebellumNet train_pattern_file(const arm::ArmModel& model, const std::string& which,
                                             const std::filesystem::path& dir, std::uint64_t seed,
                                             const std::function<void(const std::string&)>& progress) {
  const cerebellum::PatternSet defaults;
  double mass = 0.0;
  std::uint64_t salt = 0;
  if (which == "light") mass = defaults.light_mass, salt = 0x11;
  else if (which == "heavy") mass = defaults.heavy_mass, salt = 0x33;
  else throw Error("unknown pattern '" + which + "' (expected light or heavy)");
  if (progress) progress("planning training trajectories");
  const auto data = cerebellum::training_trajectories(model);
  auto net = cerebellum::CerebellumNet::create(seed ^ salt);
  cerebellum::TrainingOptions opt;
  opt.seed = seed ^ (salt << 1);
  cerebellum::train_pattern(net, model, data, {mass, Eigen::Vector3d::Zero()}, opt, [&](int epoch, double loss) {
    if (progress) progress(which + " epoch " + std::to_string(epoch) + " loss " + std::to_string(loss));
  });
  std::filesystem::create_directories(dir);
  cerebellum::save_pattern(net, dir / (which + ".json"));
  return net;
}

cerebellum::PatternSet obtain_patterns(const arm::ArmModel& model, const std::filesystem::path& dir,
                                       std::uint64_t seed, const std::function<void(const std::string&)>& progress) {
  cerebellum::PatternSet set;
  auto get = [&](const std::string& which, double mass) {
    const auto path = dir / (which + ".json");
    if (std::filesystem::exists(path)) {
      auto net = cerebellum::load_pattern(path);
      if (net.trained && net.load_mass == mass) return net;
      if (progress) progress(path.string() + " does not match, retraining");
    }
    return train_pattern_file(model, which, dir, seed, progress);
  };
  set.light = get("light", set.light_mass);
  set.heavy = get("heavy", set.heavy_mass);
  set.validate();
  return set;
}

}  // namespace cbmc::harness
