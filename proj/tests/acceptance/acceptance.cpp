// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Exit status is nonzero only if a criterion could not be evaluated. The lines are also
// written to report.txt in the work directory.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "cbmc/harness/export.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cbmc;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string summary;
};

int evaluation_errors = 0;
std::ofstream report_file;

void report(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = clock_type::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
    ++evaluation_errors;
  }
  const double elapsed = seconds_since(t0);
  const bool in_time = elapsed <= budget_s;
  std::ostringstream line;
  line << "criterion " << id << " " << ((o.pass && in_time) ? "PASS" : "FAIL") << " " << name << ": " << o.summary;
  line.precision(3);
  line << " [" << std::fixed << elapsed << " s, budget " << budget_s << " s" << (in_time ? "" : ", over budget")
       << "]";
  std::cout << line.str() << std::endl;
  report_file << line.str() << std::endl;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const std::filesystem::path kWorkDir = CBMC_ACCEPTANCE_DIR;
const std::filesystem::path kExperiments = std::filesystem::path(CBMC_ASSET_DIR) / "experiments";

// Patterns trained by criterion 3, reused by the closed-loop criteria.
std::optional<cerebellum::PatternSet> trained;

const cerebellum::PatternSet& patterns() {
  if (!trained) trained = harness::obtain_patterns(testing::shipped_model(), kWorkDir / "patterns", 1);
  return *trained;
}

harness::ExperimentContext context() {
  harness::ExperimentContext ctx;
  ctx.model = &testing::shipped_model();
  ctx.patterns = &patterns();
  return ctx;
}

// 1. Surrogate-gradient fidelity against finite differences.
Outcome gradient_fidelity() {
  std::mt19937_64 rng(2024);
  const std::vector<std::tuple<std::string, snn::Topology, int>> modules = {
      {"cerebellum", cerebellum::topology(), cerebellum::kWindow},
      {"thalamus", thalamus::topology(), thalamus::kWindow},
      {"brainstem", brainstem::topology(), brainstem::kWindow}};
  bool ok = true;
  std::string s;
  for (const auto& [name, topo, steps] : modules) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) worst = std::max(worst, testing::check_gradient(topo, rng, steps, 12).relative_error);
    ok = ok && worst <= 1e-3;
    s += name + " worst rel err " + fmt(worst) + "; ";
  }
  return {ok, s + "tolerance 1e-3"};
}

// 2. Dynamics oracles.
Outcome dynamics_oracle() {
  const auto& model = testing::shipped_model();
  std::mt19937_64 rng(77);
  double worst_grad = 0.0, worst_sym = 0.0, min_eig = 1e300, worst_drift = 0.0;
  for (int k = 0; k < 100; ++k) {
    const JointVectord q = testing::random_configuration(model, rng);
    const arm::LoadSpec load{(k % 2) ? 3.5 : 0.0, Eigen::Vector3d::Zero()};
    const JointVectord tau = arm::gravity_torque(model, q, load);
    const JointVectord fd = testing::energy_gradient(model, q, load);
    worst_grad = std::max(worst_grad, (tau - fd).norm() / tau.norm());
    const JointMatrixd M = arm::mass_matrix(model, q, load);
    worst_sym = std::max(worst_sym, (M - M.transpose()).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<JointMatrixd>(M).eigenvalues().minCoeff());
  }
  for (int k = 0; k < 5; ++k) {
    const arm::LoadSpec load{1.5 * k / 2.0, Eigen::Vector3d::Zero()};
    arm::JointState s;
    s.q = testing::random_configuration(model, rng, 0.1);
    const JointVectord q0 = s.q;
    for (int t = 0; t < 1000; ++t)
      s = arm::forward_dynamics_step(model, s, arm::gravity_torque(model, s.q, load), load, 1e-3).state;
    worst_drift = std::max(worst_drift, (s.q - q0).cwiseAbs().maxCoeff());
  }
  const bool ok = worst_grad <= 1e-6 && worst_sym <= 1e-10 && min_eig > 0.0 && worst_drift <= 1e-6;
  return {ok, "gravity vs energy gradient rel err " + fmt(worst_grad) + " (<= 1e-6), asymmetry " + fmt(worst_sym) +
                  " (<= 1e-10), min eigenvalue " + fmt(min_eig) + " (> 0), hold drift " + fmt(worst_drift) +
                  " rad (<= 1e-6)"};
}

// 3. Cerebellum regression against the gravity oracle.
Outcome cerebellum_regression(double& slowest_training) {
  const auto& model = testing::shipped_model();
  const auto dir = kWorkDir / "patterns";
  std::filesystem::remove_all(dir);
  cerebellum::PatternSet set;
  for (const char* which : {"light", "heavy"}) {
    const auto t0 = clock_type::now();
    auto net = harness::train_pattern_file(model, which, dir, 1);
    slowest_training = std::max(slowest_training, seconds_since(t0));
    (std::string(which) == "light" ? set.light : set.heavy) = std::move(net);
  }
  set.validate();
  trained = set;

  const auto data = cerebellum::training_trajectories(model);
  bool ok = slowest_training <= 15 * 60;
  std::string s;
  for (const auto* p : {&set.light, &set.heavy}) {
    const arm::LoadSpec load{p->load_mass, Eigen::Vector3d::Zero()};
    JointVectord mae = JointVectord::Zero(), lo = JointVectord::Constant(1e300), hi = -lo;
    std::size_t n = 0;
    for (const auto& traj : data) {
      Eigen::MatrixXd q(kJoints, static_cast<Eigen::Index>(traj.size()));
      for (std::size_t k = 0; k < traj.size(); ++k) q.col(static_cast<Eigen::Index>(k)) = traj.q[k];
      const Eigen::MatrixXd pred = cerebellum::forward(*p, model, q);
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const JointVectord g = arm::gravity_torque(model, traj.q[k], load);
        mae += (JointVectord(pred.col(static_cast<Eigen::Index>(k))) - g).cwiseAbs();
        lo = lo.cwiseMin(g);
        hi = hi.cwiseMax(g);
        ++n;
      }
    }
    mae /= static_cast<double>(n);
    s += (p == &set.light ? "light" : "heavy") + std::string(" MAE/range per joint:");
    for (int i = 0; i < kJoints; ++i) {
      const double range = hi[i] - lo[i];
      const bool joint_ok = mae[i] <= 0.05 * range;
      ok = ok && joint_ok;
      s += " " + fmt(mae[i]) + "/" + fmt(range) + (joint_ok ? "" : "*");
    }
    s += "; ";
  }
  return {ok, s + "limit 5% of range, * marks violations; slowest pattern " + fmt(slowest_training) + " s"};
}

// 4. Poisson encoder statistics.
Outcome encoder_statistics() {
  constexpr int k = 100, draws = 100000;
  bool ok = true;
  std::string s;
  for (double ratio : {0.1, 0.5, 0.9}) {
    double sum = 0.0;
    for (int d = 0; d < draws; ++d) {
      const spinal::CounterStream u(99, d % kJoints, static_cast<std::uint64_t>(d), 0);
      sum += spinal::poisson_encode(ratio * 0.5, 0.5, k, u);
    }
    const double mean = sum / draws, expect = 0.5 * k * ratio;
    const double sigma = std::sqrt(0.5 * k * ratio * (1 - ratio) / draws);
    const bool r_ok = std::abs(mean - expect) <= 3 * sigma;
    ok = ok && r_ok;
    s += "ratio " + fmt(ratio) + ": mean " + fmt(mean) + " vs " + fmt(expect) + " (3 sigma " + fmt(3 * sigma) + "); ";
  }
  bool exact = true;
  for (int d = 0; d < 10000; ++d) {
    const spinal::CounterStream u(5, d % kJoints, static_cast<std::uint64_t>(d), 1);
    exact = exact && spinal::poisson_encode(0.5, 0.5, k, u) == 50 && spinal::poisson_encode(3.0, 0.5, k, u) == 50 &&
            spinal::poisson_encode(-0.5, 0.5, k, u) == -50 && spinal::poisson_encode(0.0, 0.5, k, u) == 0;
  }
  return {ok && exact, s + "saturation and zero cases " + (exact ? "exact" : "NOT exact")};
}

// 5. Cadence law and bit-reproducibility over a 3 s episode.
Outcome cadence_and_reproducibility() {
  const auto& model = testing::shipped_model();
  const auto traj = trajectories::plan_joint_trajectory(model, trajectories::figure_eight(), 1e-3, 3.0);
  scheduler::LoadSchedule load;
  load.events = {{0, 1.5}, {1500, 3.0}};
  auto run = [&] {
    scheduler::FrameworkConfig config;
    config.seed = 11;
    auto m = scheduler::Modules::create(patterns(), config.seed);
    return scheduler::run_episode(config, model, load, traj, m);
  };
  const auto a = run(), b = run();
  int gain_violations = 0, pattern_violations = 0, torque_stalls = 0, gain_updates = 0, pattern_updates = 0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    const auto& p = a.records[k - 1];
    const auto& r = a.records[k];
    if (r.kp != p.kp || r.kv != p.kv) {
      ++gain_updates;
      gain_violations += r.tick % 10 != 0;
    }
    if (r.T_cb != p.T_cb) {
      ++pattern_updates;
      pattern_violations += r.tick % 50 != 0;
    }
    torque_stalls += !r.ran.spinal || r.tau == p.tau;
  }
  const auto fa = kWorkDir / "cadence-a.csv", fb = kWorkDir / "cadence-b.csv";
  harness::write_log_csv(a, fa);
  harness::write_log_csv(b, fb);
  auto slurp = [](const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool identical = a.size() == b.size() && slurp(fa) == slurp(fb);
  for (std::size_t k = 0; identical && k < a.size(); ++k) {
    const auto& x = a.records[k];
    const auto& y = b.records[k];
    identical = x.q == y.q && x.qd == y.qd && x.tau == y.tau && x.tau_g == y.tau_g && x.kp == y.kp &&
                x.kv == y.kv && x.weights == y.weights && x.T_cb == y.T_cb && x.wrench == y.wrench;
  }
  const bool ok = a.size() == 3000 && gain_violations == 0 && pattern_violations == 0 && torque_stalls == 0 &&
                  gain_updates > 0 && pattern_updates > 0 && identical;
  return {ok, std::to_string(a.size()) + " ticks; gain changes " + std::to_string(gain_updates) + " (off-cadence " +
                  std::to_string(gain_violations) + "), T_cb changes " + std::to_string(pattern_updates) +
                  " (off-cadence " + std::to_string(pattern_violations) + "), ticks without a new torque " +
                  std::to_string(torque_stalls) + ", rerun " + (identical ? "bit-identical" : "DIFFERS")};
}

// 6. Load sweep trends.
Outcome load_sweep() {
  auto spec = harness::load_experiment_spec(kExperiments / "load_sweep.json");
  const auto rep = harness::run_load_sweep(spec, context());
  bool ok = true;
  double prev_w2 = -1.0;
  std::string s;
  for (double m : spec.masses) {
    double L = 0, H = 0, B = 0, w2 = 0;
    for (const auto& r : rep.rows) {
      if (r.mass != m) continue;
      if (r.configuration == "light-only") L = r.rmse;
      if (r.configuration == "heavy-only") H = r.rmse;
      if (r.configuration == "blended") B = r.rmse, w2 = r.w2;
    }
    const bool dominance = B <= 1.05 * std::min(L, H);
    const bool monotone = w2 >= prev_w2;
    ok = ok && dominance && monotone;
    prev_w2 = w2;
    s += fmt(m) + " kg: L " + fmt(L * 1e3) + " H " + fmt(H * 1e3) + " B " + fmt(B * 1e3) + " mrad" +
         (dominance ? "" : "*") + " w2 " + fmt(w2) + (monotone ? "" : "*") + "; ";
  }
  return {ok, s + "blended <= 1.05 min(single), w2 non-decreasing"};
}

// 7. Resilience to load events.
Outcome resilience() {
  auto spec = harness::load_experiment_spec(kExperiments / "resilience.json");
  const auto rep = harness::run_resilience(spec, context());
  if (rep.events.size() != 3) return {false, "expected 3 load events, got " + std::to_string(rep.events.size())};
  bool recovered = true;
  std::string s;
  for (const auto& e : rep.events) {
    const bool r_ok = e.recovery_time >= 0.0 && e.recovery_time <= 3.0;
    recovered = recovered && r_ok;
    s += "t=" + fmt(e.time) + " s: plateau " + fmt(e.plateau * 1e3) + " mrad, excursion " + fmt(e.excursion * 1e3) +
         " mrad, recovery " + fmt(e.recovery_time) + " s" + (r_ok ? "" : "*") + "; ";
  }
  const bool ordered = rep.events[2].excursion < rep.events[1].excursion &&
                       rep.events[1].excursion < rep.events[0].excursion;
  return {recovered && ordered,
          s + "recovery <= 3 s " + (recovered ? "met" : "NOT met") + ", excursions decreasing " +
              (ordered ? "met" : "NOT met")};
}

// 8. Ablations.
Outcome ablations() {
  auto spec = harness::load_experiment_spec(kExperiments / "ablation.json");
  const auto rep = harness::run_ablation(spec, context());
  const harness::AggregateRow* full = nullptr;
  for (const auto& r : rep.rows)
    if (r.configuration == "full") full = &r;
  if (!full || rep.rows.size() != 4) return {false, "expected the full run and three ablations"};
  bool ok = true;
  std::string s = "full: " + fmt(full->rmse * 1e3) + " mrad, " + std::to_string(full->peaks) + " peaks; ";
  for (const auto& r : rep.rows) {
    if (&r == full) continue;
    const bool worse = r.rmse >= full->rmse;
    const bool fewer = full->peaks >= r.peaks;
    ok = ok && worse && fewer;
    s += r.configuration + ": " + fmt(r.rmse * 1e3) + " mrad" + (worse ? "" : "*") + ", " +
         std::to_string(r.peaks) + " peaks" + (fewer ? "" : "*") + "; ";
  }
  return {ok, s + "ablation RMSE >= full, full peaks >= ablation peaks"};
}

// 9. Real-time budget.
Outcome timing() {
  const auto& model = testing::shipped_model();
  const auto traj = trajectories::plan_joint_trajectory(model, trajectories::training_inclined_circle(), 1e-3, 3.0);
  scheduler::LoadSchedule load;
  load.events = {{0, 2.0}};
  scheduler::FrameworkConfig config;
  auto m = scheduler::Modules::create(patterns(), 3);
  scheduler::EpisodeOptions opt;
  opt.measure_time = true;
  const auto log = scheduler::run_episode(config, model, load, traj, m, opt);
  const double spinal_us = log.mean_spinal_seconds * 1e6, tick_us = log.mean_tick_seconds * 1e6;
  return {spinal_us <= 100.0 && tick_us <= 1000.0,
          "mean spinal_step " + fmt(spinal_us) + " us (<= 100), mean tick " + fmt(tick_us) + " us (<= 1000)"};
}

}  // namespace

int main() {
  std::filesystem::create_directories(kWorkDir);
  report_file.open(kWorkDir / "report.txt");
  double slowest_training = 0.0;
  report(1, "SNN gradient fidelity", 60, gradient_fidelity);
  report(2, "dynamics oracle", 60, dynamics_oracle);
  // the budget is per pattern; the measured time is checked inside
  report(3, "cerebellum regression", 2 * 15 * 60, [&] { return cerebellum_regression(slowest_training); });
  report(4, "encoder statistics", 10, encoder_statistics);
  report(5, "scheduler cadence and reproducibility", 60, cadence_and_reproducibility);
  report(6, "load sweep", 30 * 60, load_sweep);
  report(7, "resilience", 10 * 60, resilience);
  report(8, "ablations", 15 * 60, ablations);
  report(9, "real-time budget", 60, timing);
  return evaluation_errors == 0 ? 0 : 1;
}
