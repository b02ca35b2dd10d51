#pragma once

// Reference implementations used by the unit and acceptance tests. They are
// written with plain loops and share no code with the library kernels.

#include <cmath>
#include <random>
#include <vector>

#include "cbmc/arm/dynamics.hpp"
#include "cbmc/snn/network.hpp"

namespace cbmc::testing {

/// Reset masks recorded by a reference forward pass: masks[t][l][i].
using ResetMasks = std::vector<std::vector<std::vector<double>>>;

/// Forward pass of the sigmoid-smoothed network for one sample, with plain
/// loops. When `frozen` is given, the reset uses those masks instead of the
/// current spikes, which makes the function differentiable exactly the way
/// backprop_window treats it (reset branch detached).
inline std::vector<double> reference_forward(const snn::Topology& topo,
                                             const std::vector<Eigen::MatrixXd>& weights,
                                             const std::vector<std::vector<double>>& inputs, double nu,
                                             ResetMasks* record, const ResetMasks* frozen) {
  const std::size_t L = topo.layers.size();
  std::vector<std::vector<double>> u(L), prev(L + 1);
  for (std::size_t l = 0; l < L; ++l) u[l].assign(topo.layers[l].size, topo.layers[l].params.u_reset);
  prev[0].assign(topo.input_size, 0.0);
  for (std::size_t l = 0; l < L; ++l) prev[l + 1].assign(topo.layers[l].size, 0.0);
  if (record) record->assign(inputs.size(), std::vector<std::vector<double>>(L));

  for (std::size_t t = 0; t < inputs.size(); ++t) {
    std::vector<double> a = inputs[t];
    for (std::size_t l = 0; l < L; ++l) {
      const auto& spec = topo.layers[l];
      const auto& p = spec.params;
      std::vector<double> pre = a;
      if (spec.with_previous_step) pre.insert(pre.end(), prev[l].begin(), prev[l].end());
      std::vector<double> s(spec.size, 0.0);
      for (Eigen::Index i = 0; i < spec.size; ++i) {
        double current = 0.0;
        for (std::size_t j = 0; j < pre.size(); ++j) current += weights[l](i, static_cast<Eigen::Index>(j)) * pre[j];
        double h = u[l][i] - (u[l][i] - p.u_reset) / p.tau_mb + p.r_mem * current / p.tau_mb;
        if (p.is_spiking()) {
          s[i] = 1.0 / (1.0 + std::exp(-nu * (h - p.u_fire)));
          const double m = frozen ? (*frozen)[t][l][i] : s[i];
          u[l][i] = h * (1.0 - m) + p.u_reset * m;
        } else {
          u[l][i] = h;
        }
      }
      if (record) (*record)[t][l] = s;
      prev[l] = a;
      a = s;
    }
    prev[L] = a;
  }
  return u[L - 1];
}

struct GradientCheck {
  double relative_error = 0.0;  // ||g - fd|| / ||fd|| over the checked entries
  int entries = 0;
};

/// Compares backprop_window of the sigmoid twin with central differences of
/// <c, output> on up to `per_layer` random weights of each layer.
inline GradientCheck check_gradient(const snn::Topology& topo, std::mt19937_64& rng, int steps, int per_layer,
                                    double weight_scale = 1.0, double h = 1e-6) {
  snn::SpikingNetworkd net(topo, snn::SurrogateConfig{5.0}, snn::SpikeFunction::sigmoid);
  net.initialize(rng());
  for (std::size_t l = 0; l < net.num_layers(); ++l) net.synapses(l).weights *= weight_scale;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> inputs(steps, std::vector<double>(topo.input_size));
  std::vector<Eigen::MatrixXd> x(steps, Eigen::MatrixXd(topo.input_size, 1));
  for (int t = 0; t < steps; ++t)
    for (Eigen::Index i = 0; i < topo.input_size; ++i) x[t](i, 0) = inputs[t][i] = normal(rng);
  Eigen::MatrixXd c(topo.output_size(), 1);
  for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, 0) = normal(rng);

  snn::WindowTape<double> tape;
  net.run_window(x, &tape);
  const auto grads = net.backprop_window(tape, c);

  std::vector<Eigen::MatrixXd> w;
  for (std::size_t l = 0; l < net.num_layers(); ++l) w.push_back(net.synapses(l).weights);
  ResetMasks masks;
  reference_forward(topo, w, inputs, 5.0, &masks, nullptr);
  auto loss = [&](const std::vector<Eigen::MatrixXd>& ww) {
    const auto out = reference_forward(topo, ww, inputs, 5.0, nullptr, &masks);
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) s += c(static_cast<Eigen::Index>(i), 0) * out[i];
    return s;
  };

  double num = 0.0, den = 0.0;
  GradientCheck out;
  for (std::size_t l = 0; l < w.size(); ++l) {
    std::uniform_int_distribution<Eigen::Index> row(0, w[l].rows() - 1), col(0, w[l].cols() - 1);
    const int n = static_cast<int>(std::min<Eigen::Index>(per_layer, w[l].size()));
    for (int k = 0; k < n; ++k) {
      const Eigen::Index i = row(rng), j = col(rng);
      auto plus = w, minus = w;
      plus[l](i, j) += h;
      minus[l](i, j) -= h;
      const double fd = (loss(plus) - loss(minus)) / (2.0 * h);
      num += std::pow(grads[l](i, j) - fd, 2);
      den += fd * fd;
      ++out.entries;
    }
  }
  out.relative_error = std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
  return out;
}

/// Central-difference gradient of the potential energy.
inline JointVectord energy_gradient(const arm::ArmModel& model, const JointVectord& q, const arm::LoadSpec& load,
                                    double h = 1e-5) {
  JointVectord g;
  for (int i = 0; i < kJoints; ++i) {
    JointVectord qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    g[i] = (arm::potential_energy(model, qp, load) - arm::potential_energy(model, qm, load)) / (2 * h);
  }
  return g;
}

}  // namespace cbmc::testing
