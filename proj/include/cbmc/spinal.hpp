#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "cbmc/types.hpp"

namespace cbmc::spinal {

struct EncodingParams {
  int k = 100;             // neurons per error channel, half agonist and half antagonist
  double delta_q = 0.5;    // rad
  double delta_qd = 0.5;   // rad/s

  void validate() const;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based uniform stream keyed by (seed, joint, tick, channel). Draw j
/// is a pure function of the key and j, so any tick can be replayed.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, int joint, std::uint64_t tick, int channel) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(joint));
    h = splitmix64(h ^ tick);
    key_ = splitmix64(h ^ static_cast<std::uint64_t>(channel));
  }

  /// Uniform on (0, 1].
  double uniform(int j) const {
    const std::uint64_t x = splitmix64(key_ + static_cast<std::uint64_t>(j) * 0xd1b54a32d192ed03ULL);
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Signed agonist-antagonist spike sum in [-k/2, k/2]. Each of the k/2 neurons
/// on the error's side fires when min(|error|/delta, 1) >= u_j.
template <typename UniformSource>
int poisson_encode(double error, double delta, int k, const UniformSource& uniforms) {
  if (!(delta > 0.0)) throw Error("poisson_encode: delta must be positive");
  if (!std::isfinite(error)) throw Error("poisson_encode: non-finite error");
  const double ratio = std::min(std::abs(error) / delta, 1.0);
  const int half = k / 2;
  const int offset = error >= 0.0 ? 0 : half;
  int count = 0;
  for (int j = 0; j < half; ++j) count += ratio >= uniforms.uniform(offset + j);
  return error >= 0.0 ? count : -count;
}

struct SpinalState {
  JointVectord u_sp = JointVectord::Zero();
  JointVectord spikes_q = JointVectord::Zero();   // latest signed sums, kept for the brainstem
  JointVectord spikes_qd = JointVectord::Zero();
  std::uint64_t seed = 0;
};

inline constexpr double kTauSpinal = 2.0;

/// One 1 ms reflex update: encode errors, form the increment
/// tau_g + kp*S_q + kv*S_qd, leak-integrate with tau_mb = 2 and clamp to the
/// effort limits.
JointVectord spinal_step(SpinalState& state, std::uint64_t tick, const JointVectord& q_d, const JointVectord& qd_d,
                         const JointVectord& q, const JointVectord& qd, const JointVectord& kp,
                         const JointVectord& kv, const JointVectord& tau_g, const JointVectord& effort_limits,
                         const EncodingParams& params = {});

}  // namespace cbmc::spinal
