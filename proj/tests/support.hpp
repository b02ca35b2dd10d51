#pragma once

#include <random>

#include "cbmc/arm/dynamics.hpp"
#include "cbmc/cerebellum.hpp"

namespace cbmc::testing {

inline const arm::ArmModel& shipped_model() {
  static const arm::ArmModel model = arm::load_model(arm::default_model_path());
  return model;
}

/// Uniform configuration strictly inside the joint limits.
inline JointVectord random_configuration(const arm::ArmModel& model, std::mt19937_64& rng, double margin = 0.05) {
  JointVectord q;
  for (int i = 0; i < kJoints; ++i) {
    const auto& lim = model.joints[i].limits;
    const double span = lim.upper - lim.lower;
    std::uniform_real_distribution<double> d(lim.lower + margin * span, lim.upper - margin * span);
    q[i] = d(rng);
  }
  return q;
}

inline JointVectord random_vector(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  JointVectord v;
  for (int i = 0; i < kJoints; ++i) v[i] = d(rng);
  return v;
}

/// Untrained patterns flagged as trained, for plumbing tests: light predicts
/// zero, heavy is a seeded net scaled up so its spiking layers fire.
inline const cerebellum::PatternSet& usable_patterns() {
  static const cerebellum::PatternSet set = [] {
    cerebellum::PatternSet s;
    s.light = cerebellum::CerebellumNet::create(1);
    for (std::size_t l = 0; l < s.light.network.num_layers(); ++l) s.light.network.synapses(l).weights.setZero();
    s.heavy = cerebellum::CerebellumNet::create(2);
    for (std::size_t l = 0; l < s.heavy.network.num_layers(); ++l) s.heavy.network.synapses(l).weights *= 20.0;
    s.light.trained = s.heavy.trained = true;
    s.heavy.load_mass = 3.0;
    return s;
  }();
  return set;
}

}  // namespace cbmc::testing
