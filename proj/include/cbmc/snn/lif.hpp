#pragma once

#include <cmath>
#include <limits>

#include "cbmc/types.hpp"

namespace cbmc::snn {

/// Leaky integrate-and-fire parameters, in units of simulation steps.
///
/// A layer with `u_fire == +inf` is non-spiking: its membrane potential is the
/// analog output. `tau_syn` is kept for completeness; synapses are
/// instantaneous, so weighted spike sums enter the membrane directly.
struct LifParams {
  double tau_mb = 10.0;
  double u_reset = 0.0;
  double u_fire = 0.1;
  double r_mem = 1.0;
  double tau_syn = 0.0;

  static LifParams spiking(double tau_mb, double u_reset, double u_fire) {
    return {tau_mb, u_reset, u_fire, 1.0, 0.0};
  }
  static LifParams non_spiking(double tau_mb, double u_reset) {
    return {tau_mb, u_reset, std::numeric_limits<double>::infinity(), 1.0, 0.0};
  }

  bool is_spiking() const { return std::isfinite(u_fire); }

  void validate() const {
    if (!(tau_mb > 1.0)) throw Error("LifParams: tau_mb must exceed 1 step");
    if (!(r_mem > 0.0)) throw Error("LifParams: r_mem must be positive");
    if (is_spiking() ? !(u_fire > u_reset) : !(u_fire > 0))
      throw Error("LifParams: u_fire must exceed u_reset or be +inf");
  }
};

template <typename Scalar = double>
struct LifLayerState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector potentials;
  Vector last_spikes;

  LifLayerState() = default;
  LifLayerState(Eigen::Index n, const LifParams& p)
      : potentials(Vector::Constant(n, Scalar(p.u_reset))), last_spikes(Vector::Zero(n)) {}
};

struct SurrogateConfig {
  double nu = 5.0;
};

struct SurrogateValue {
  double forward;
  double grad;
};

inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

inline double sigmoid(double x, double nu) { return 1.0 / (1.0 + std::exp(-nu * x)); }

/// Heaviside forward, derivative of 1/(1+exp(-nu x)) backward.
inline SurrogateValue surrogate_sigmoid(double x, const SurrogateConfig& cfg) {
  const double s = sigmoid(x, cfg.nu);
  return {heaviside(x), cfg.nu * s * (1.0 - s)};
}

/// One discrete LIF update:
///   u(t) = u(t-1) - (u(t-1) - u_reset)/tau_mb + r_mem * I(t)/tau_mb
/// followed by threshold and hard reset for spiking layers. Returns the spikes.
template <typename Scalar, typename Derived>
typename LifLayerState<Scalar>::Vector lif_step(LifLayerState<Scalar>& state,
                                                const Eigen::MatrixBase<Derived>& input_current,
                                                const LifParams& p) {
  if (input_current.size() != state.potentials.size())
    throw Error("lif_step: input size does not match layer size");
  if (!input_current.allFinite()) throw Error("lif_step: non-finite input current");

  const Scalar inv_tau = Scalar(1.0 / p.tau_mb);
  const Scalar reset = Scalar(p.u_reset);
  auto& u = state.potentials;
  u = u - (u.array() - reset).matrix() * inv_tau + input_current.template cast<Scalar>() * Scalar(p.r_mem) * inv_tau;

  if (!p.is_spiking()) {
    state.last_spikes.setZero();
    return state.last_spikes;
  }
  const Scalar fire = Scalar(p.u_fire);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const bool spike = u[i] >= fire;
    state.last_spikes[i] = spike ? Scalar(1) : Scalar(0);
    if (spike) u[i] = reset;
  }
  return state.last_spikes;
}

}  // namespace cbmc::snn
