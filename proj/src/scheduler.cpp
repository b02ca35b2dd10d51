#include "cbmc/scheduler.hpp"

#include <chrono>
#include <random>

namespace cbmc::scheduler {

void FrameworkConfig::validate() const {
  if (T1 != 1) throw Error("FrameworkConfig: T1 must be 1 tick");
  if (T2 < 1 || T3 < 1 || T2 % T1 != 0 || T3 % T2 != 0)
    throw Error("FrameworkConfig: periods must nest (T1 | T2 | T3)");
  if (!(dt > 0.0)) throw Error("FrameworkConfig: dt must be positive");
  encoding.validate();
}

FrameworkConfig apply_ablation(FrameworkConfig config, const Ablations& flags) {
  config.ablations.freeze_brainstem = config.ablations.freeze_brainstem || flags.freeze_brainstem;
  config.ablations.freeze_thalamus = config.ablations.freeze_thalamus || flags.freeze_thalamus;
  config.ablations.fixed_cerebellum_torque =
      config.ablations.fixed_cerebellum_torque || flags.fixed_cerebellum_torque;
  return config;
}

Subthreads due_subthreads(const FrameworkConfig& config, std::uint64_t tick) {
  Subthreads s;
  s.spinal = tick % static_cast<std::uint64_t>(config.T1) == 0;
  s.brainstem = s.thalamus = tick % static_cast<std::uint64_t>(config.T2) == 0;
  s.cerebellum = tick % static_cast<std::uint64_t>(config.T3) == 0;
  return s;
}

double LoadSchedule::mass_at_start() const {
  double m = 0.0;
  for (const auto& e : events)
    if (e.tick == 0) m = e.mass;
  return m;
}

void LoadSchedule::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (!(events[i].mass >= 0.0)) throw Error("LoadSchedule: load mass must be non-negative");
    if (i > 0 && events[i].tick < events[i - 1].tick) throw Error("LoadSchedule: events must be in tick order");
  }
  if (!offset.allFinite()) throw Error("LoadSchedule: non-finite offset");
}

void SharedBus::publish_state(std::uint64_t tick, const JointVectord& q_d, const JointVectord& qd_d,
                              const arm::JointState& s, const arm::Wrench& w) {
  snap_.q_d = q_d;
  snap_.qd_d = qd_d;
  snap_.q = s.q;
  snap_.qd = s.qd;
  snap_.wrench = w;
  snap_.state_tick = tick;
}

void SharedBus::publish_gains(std::uint64_t tick, const brainstem::Gains& g) {
  snap_.gains = g;
  snap_.gains_tick = tick;
}

void SharedBus::publish_compensation(std::uint64_t tick, const JointVectord& tau_g, const Eigen::Vector2d& w) {
  snap_.tau_g = tau_g;
  snap_.weights = w;
  snap_.tau_g_tick = tick;
}

void SharedBus::publish_patterns(std::uint64_t tick, const CompensationMatrixd& T_cb) {
  snap_.T_cb = T_cb;
  snap_.T_cb_tick = tick;
}

void SharedBus::publish_torque(std::uint64_t tick, const JointVectord& tau) {
  snap_.tau = tau;
  snap_.tau_tick = tick;
}

Modules Modules::create(const cerebellum::PatternSet& patterns, std::uint64_t seed) {
  Modules m;
  m.patterns = &patterns;
  m.brainstem = brainstem::BrainstemNet::create(spinal::splitmix64(seed ^ 0xb5a1ULL));
  m.thalamus = thalamus::ThalamusNet::create(spinal::splitmix64(seed ^ 0x7a1aULL));
  return m;
}

RunLog run_episode(const FrameworkConfig& config, const arm::ArmModel& model, const LoadSchedule& load_schedule,
                   const trajectories::JointTrajectory& trajectory, Modules& modules,
                   const EpisodeOptions& options) {
  using clock = std::chrono::steady_clock;
  config.validate();
  load_schedule.validate();
  if (!modules.patterns) throw Error("run_episode: no motor patterns");
  modules.patterns->validate();
  if (trajectory.size() == 0) throw Error("run_episode: empty trajectory");
  if (std::abs(trajectory.dt - config.dt) > 1e-12) throw Error("run_episode: trajectory dt differs from plant dt");

  const Ablations& abl = config.ablations;
  const JointVectord effort = model.effort_limits();
  std::mt19937_64 sensor_rng(spinal::splitmix64(config.seed ^ 0x5e05ULL));

  arm::LoadSpec load{load_schedule.mass_at_start(), load_schedule.offset};
  arm::JointState state{trajectory.q[0], trajectory.qd[0]};
  JointVectord qdd = JointVectord::Zero();
  spinal::SpinalState spinal_state;
  spinal_state.seed = config.seed;
  thalamus::FilterState filter;
  SharedBus bus;

  const CompensationMatrixd fixed_T_cb = [&] {
    const JointVectord light = cerebellum::predict(modules.patterns->light, model, trajectory.q[0]);
    CompensationMatrixd T;
    T << light, light;
    return T;
  }();
  auto cerebellum_thread = [&](const JointVectord& q) -> CompensationMatrixd {
    if (abl.fixed_cerebellum_torque) return fixed_T_cb;
    return cerebellum::predict_matrix(*modules.patterns, model, q);
  };
  const bool blend_learns = config.patterns == PatternMode::blended && !abl.freeze_thalamus;
  auto sense = [&](const arm::Wrench& w) -> Eigen::Vector2d {
    switch (config.patterns) {
      case PatternMode::light_only: return {1.0, 0.0};
      case PatternMode::heavy_only: return {0.0, 1.0};
      case PatternMode::blended: break;
    }
    return thalamus::sense_weights(modules.thalamus, w);
  };
  auto measure = [&]() {
    const arm::Wrench clean = arm::end_effector_wrench(model, state, qdd, load, config.wrench_mode);
    return arm::add_sensor_noise(clean, config.sensor_noise, sensor_rng);
  };

  // Level initialization before the first tick.
  {
    const arm::Wrench w = measure();
    bus.publish_state(0, trajectory.q[0], trajectory.qd[0], state, w);
    bus.publish_gains(0, brainstem::compute_gains(modules.brainstem, model, trajectory.q[0], trajectory.qd[0],
                                                  state.q, state.qd, config.gain_limits));
    const CompensationMatrixd T_cb = cerebellum_thread(state.q);
    bus.publish_patterns(0, T_cb);
    const Eigen::Vector2d weights = sense(w);
    // the thalamic filter and the spinal neurons start at rest
    filter.u_ft.setZero();
    spinal_state.u_sp.setZero();
    bus.publish_compensation(0, filter.u_ft, weights);
    bus.publish_torque(0, spinal_state.u_sp);
  }
  const Eigen::Vector2d frozen_weights = bus.read().weights;

  RunLog log;
  log.dt = config.dt;
  log.records.reserve(trajectory.size());
  std::size_t next_event = 0;
  while (next_event < load_schedule.events.size() && load_schedule.events[next_event].tick == 0) ++next_event;
  double tick_seconds = 0.0, spinal_seconds = 0.0;

  for (std::uint64_t t = 1; t <= trajectory.size(); ++t) {
    const auto tick_start = options.measure_time ? clock::now() : clock::time_point{};
    const auto [q_d, qd_d] = trajectories::replay(trajectory, t - 1);
    bus.publish_state(t, q_d, qd_d, state, measure());
    const Subthreads due = due_subthreads(config, t);
    TickRecord rec;

    // Sub-thread 1: spinal cord.
    if (due.spinal) {
      const BusSnapshot s = bus.read();
      const auto t0 = options.measure_time ? clock::now() : clock::time_point{};
      const JointVectord tau = spinal::spinal_step(spinal_state, t, s.q_d, s.qd_d, s.q, s.qd, s.gains.kp,
                                                   s.gains.kv, s.tau_g, effort, config.encoding);
      if (options.measure_time) spinal_seconds += std::chrono::duration<double>(clock::now() - t0).count();
      bus.publish_torque(t, tau);
    }
    // Sub-thread 2: brainstem.
    if (due.brainstem && !abl.freeze_brainstem) {
      const BusSnapshot s = bus.read();
      bus.publish_gains(t, brainstem::compute_gains(modules.brainstem, model, s.q_d, s.qd_d, s.q, s.qd,
                                                    config.gain_limits));
      const auto loss = brainstem::brainstem_loss(s.q_d, s.q, s.qd_d, s.qd, s.tau, spinal_state.spikes_q,
                                                  spinal_state.spikes_qd);
      brainstem::online_update(modules.brainstem, loss, config.gain_limits);
      rec.brainstem_loss = loss.value;
    }
    // Sub-thread 3: thalamus.
    if (due.thalamus) {
      const BusSnapshot s = bus.read();
      const Eigen::Vector2d weights = blend_learns ? sense(s.wrench) : frozen_weights;
      bus.publish_compensation(t, thalamus::filter_step(filter, thalamus::combine(s.T_cb, weights)), weights);
      if (blend_learns)
        rec.thalamus_loss = thalamus::online_update(modules.thalamus, s.T_cb, s.q_d, s.q, s.qd_d, s.qd).loss;
    }
    // Sub-thread 4: cerebellum.
    if (due.cerebellum) bus.publish_patterns(t, cerebellum_thread(bus.read().q));

    const BusSnapshot s = bus.read();
    const arm::StepResult step = arm::forward_dynamics_step(model, state, s.tau, load, config.dt);
    state = step.state;
    qdd = step.qdd;
    while (next_event < load_schedule.events.size() && load_schedule.events[next_event].tick == t)
      load.mass = load_schedule.events[next_event++].mass;

    if (options.measure_time) tick_seconds += std::chrono::duration<double>(clock::now() - tick_start).count();

    rec.tick = t;
    rec.time = static_cast<double>(t) * config.dt;
    rec.q_d = q_d;
    rec.qd_d = qd_d;
    rec.q = state.q;
    rec.qd = state.qd;
    rec.tau = s.tau;
    rec.tau_g = s.tau_g;
    rec.kp = s.gains.kp;
    rec.kv = s.gains.kv;
    rec.weights = s.weights;
    rec.T_cb = s.T_cb;
    rec.wrench = s.wrench.stacked();
    rec.load_mass = load.mass;
    rec.ran = due;
    rec.ran.brainstem = due.brainstem && !abl.freeze_brainstem;
    log.records.push_back(rec);
  }
  if (options.measure_time) {
    log.mean_tick_seconds = tick_seconds / static_cast<double>(trajectory.size());
    log.mean_spinal_seconds = spinal_seconds / static_cast<double>(trajectory.size());
  }
  return log;
}

}  // namespace cbmc::scheduler
