#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cbmc/snn/lif.hpp"

namespace cbmc::snn {

enum class SpikeFunction {
  heaviside,  // deployed networks
  sigmoid,    // smoothed twin, used to validate gradients
};

struct LayerSpec {
  Eigen::Index size = 0;
  LifParams params;
  /// Feed [spikes(t), spikes(t-1)] of the previous layer instead of spikes(t).
  bool with_previous_step = false;
};

struct Topology {
  Eigen::Index input_size = 0;
  std::vector<LayerSpec> layers;

  Eigen::Index fan_in(std::size_t l) const {
    const Eigen::Index pre = l == 0 ? input_size : layers[l - 1].size;
    return layers[l].with_previous_step ? 2 * pre : pre;
  }
  Eigen::Index output_size() const { return layers.back().size; }
};

template <typename Scalar = double>
struct DenseSynapses {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix weights;          // post x pre
  Matrix momentum_buffer;  // same shape

  DenseSynapses() = default;
  DenseSynapses(Eigen::Index post, Eigen::Index pre)
      : weights(Matrix::Zero(post, pre)), momentum_buffer(Matrix::Zero(post, pre)) {}
};

/// Everything backprop needs from one forward window. Indexed [step][layer];
/// each matrix has one column per batch sample.
template <typename Scalar = double>
struct WindowTape {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  int steps = 0;
  Eigen::Index batch = 0;
  SpikeFunction spike_function = SpikeFunction::heaviside;
  std::vector<std::vector<Matrix>> presynaptic;
  std::vector<std::vector<Matrix>> pre_reset;
  std::vector<std::vector<Matrix>> spikes;

  bool complete() const { return steps > 0 && static_cast<int>(presynaptic.size()) == steps; }
};

/// Layered discrete-time LIF network with dense synapses between consecutive
/// layers. Every window starts from the reset state; the decoded output is the
/// membrane potential of the last layer after the final step.
template <typename Scalar = double>
class SpikingNetwork {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SpikingNetwork() = default;
  SpikingNetwork(Topology topology, SurrogateConfig surrogate,
                 SpikeFunction spike_function = SpikeFunction::heaviside)
      : topology_(std::move(topology)), surrogate_(surrogate), spike_function_(spike_function) {
    if (topology_.layers.empty()) throw Error("SpikingNetwork: no layers");
    if (!(surrogate_.nu > 0.0)) throw Error("SpikingNetwork: surrogate nu must be positive");
    for (std::size_t l = 0; l < topology_.layers.size(); ++l) {
      const auto& layer = topology_.layers[l];
      layer.params.validate();
      if (layer.size <= 0) throw Error("SpikingNetwork: empty layer");
      if (!layer.params.is_spiking() && l + 1 != topology_.layers.size())
        throw Error("SpikingNetwork: only the output layer may be non-spiking");
      synapses_.emplace_back(layer.size, topology_.fan_in(l));
    }
  }

  const Topology& topology() const { return topology_; }
  const SurrogateConfig& surrogate() const { return surrogate_; }
  SpikeFunction spike_function() const { return spike_function_; }
  void set_spike_function(SpikeFunction f) { spike_function_ = f; }

  std::size_t num_layers() const { return synapses_.size(); }
  DenseSynapses<Scalar>& synapses(std::size_t l) { return synapses_.at(l); }
  const DenseSynapses<Scalar>& synapses(std::size_t l) const { return synapses_.at(l); }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero momentum.
  void initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& syn : synapses_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(syn.weights.cols()));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (Eigen::Index j = 0; j < syn.weights.cols(); ++j)
        for (Eigen::Index i = 0; i < syn.weights.rows(); ++i) syn.weights(i, j) = Scalar(dist(rng));
      syn.momentum_buffer.setZero();
    }
  }

  /// Runs one window. `inputs[t]` is (input_size x batch). Returns the output
  /// layer potentials after the last step (output_size x batch).
  Matrix run_window(const std::vector<Matrix>& inputs, WindowTape<Scalar>* tape = nullptr) const {
    if (inputs.empty()) throw Error("run_window: window length must be >= 1");
    const Eigen::Index batch = inputs.front().cols();
    for (const auto& x : inputs) {
      if (x.rows() != topology_.input_size || x.cols() != batch)
        throw Error("run_window: input shape does not match the first layer");
      if (!x.allFinite()) throw Error("run_window: non-finite input current");
    }
    const int steps = static_cast<int>(inputs.size());
    const std::size_t L = synapses_.size();

    if (tape) {
      tape->steps = steps;
      tape->batch = batch;
      tape->spike_function = spike_function_;
      tape->presynaptic.assign(steps, std::vector<Matrix>(L));
      tape->pre_reset.assign(steps, std::vector<Matrix>(L));
      tape->spikes.assign(steps, std::vector<Matrix>(L));
    }

    std::vector<Matrix> u(L), prev_out(L + 1);
    for (std::size_t l = 0; l < L; ++l) {
      u[l] = Matrix::Constant(topology_.layers[l].size, batch, Scalar(topology_.layers[l].params.u_reset));
    }
    // prev_out[0] is the input at t-1, prev_out[l+1] the spikes of layer l at t-1.
    prev_out[0] = Matrix::Zero(topology_.input_size, batch);
    for (std::size_t l = 0; l < L; ++l) prev_out[l + 1] = Matrix::Zero(topology_.layers[l].size, batch);

    Matrix pre, h, s;
    for (int t = 0; t < steps; ++t) {
      Matrix a = inputs[t];
      for (std::size_t l = 0; l < L; ++l) {
        const auto& spec = topology_.layers[l];
        const auto& p = spec.params;
        if (spec.with_previous_step) {
          pre.resize(2 * a.rows(), batch);
          pre.topRows(a.rows()) = a;
          pre.bottomRows(a.rows()) = prev_out[l];
        } else {
          pre = a;
        }
        const Scalar inv_tau = Scalar(1.0 / p.tau_mb);
        const Scalar reset = Scalar(p.u_reset);
        h.noalias() = synapses_[l].weights * pre;
        h *= Scalar(p.r_mem) * inv_tau;
        h += u[l] - (u[l].array() - reset).matrix() * inv_tau;

        if (p.is_spiking()) {
          const Scalar fire = Scalar(p.u_fire);
          if (spike_function_ == SpikeFunction::heaviside) {
            s = (h.array() >= fire).template cast<Scalar>().matrix();
          } else {
            s = (Scalar(1) / (Scalar(1) + (-Scalar(surrogate_.nu) * (h.array() - fire)).exp())).matrix();
          }
          u[l] = (h.array() * (Scalar(1) - s.array()) + reset * s.array()).matrix();
        } else {
          s.setZero(h.rows(), batch);
          u[l] = h;
        }
        if (tape) {
          tape->presynaptic[t][l] = pre;
          tape->pre_reset[t][l] = h;
          tape->spikes[t][l] = s;
        }
        prev_out[l] = std::move(a);
        a = s;
      }
      prev_out[L] = std::move(a);
    }
    return u[L - 1];
  }

  /// Same input current at every step of a window of length `steps`.
  Matrix run_window(const Matrix& constant_input, int steps, WindowTape<Scalar>* tape = nullptr) const {
    if (steps < 1) throw Error("run_window: window length must be >= 1");
    return run_window(std::vector<Matrix>(steps, constant_input), tape);
  }

  /// Backprop through time for the scalar <output_grad, decoded output>.
  /// Spikes use the surrogate derivative; the reset branch is detached, i.e.
  /// u = h*(1 - sg(s)) + u_reset*sg(s).
  std::vector<Matrix> backprop_window(const WindowTape<Scalar>& tape, const Matrix& output_grad) const {
    if (!tape.complete()) throw Error("backprop_window: incomplete tape");
    const std::size_t L = synapses_.size();
    if (output_grad.rows() != topology_.output_size() || output_grad.cols() != tape.batch)
      throw Error("backprop_window: output gradient shape does not match the decode");

    const Eigen::Index batch = tape.batch;
    std::vector<Matrix> grads(L), du(L), delayed_now(L), delayed_next(L);
    for (std::size_t l = 0; l < L; ++l) {
      grads[l] = Matrix::Zero(synapses_[l].weights.rows(), synapses_[l].weights.cols());
      du[l] = Matrix::Zero(topology_.layers[l].size, batch);
      delayed_next[l] = Matrix::Zero(topology_.layers[l].size, batch);
    }
    du[L - 1] = output_grad;

    const Scalar nu = Scalar(surrogate_.nu);
    Matrix ds, dh, dI, din;
    for (int t = tape.steps - 1; t >= 0; --t) {
      for (std::size_t l = 0; l < L; ++l) {
        delayed_now[l] = delayed_next[l];
        delayed_next[l].setZero();
      }
      Matrix ds_from_above;
      for (std::size_t li = L; li-- > 0;) {
        const auto& spec = topology_.layers[li];
        const auto& p = spec.params;
        const Matrix& h = tape.pre_reset[t][li];
        const Scalar inv_tau = Scalar(1.0 / p.tau_mb);

        if (p.is_spiking()) {
          ds = li + 1 == L ? Matrix::Zero(spec.size, batch) : ds_from_above;
          ds += delayed_now[li];
          const auto& s = tape.spikes[t][li];
          const auto sig = (Scalar(1) / (Scalar(1) + (-nu * (h.array() - Scalar(p.u_fire))).exp()));
          dh = ((Scalar(1) - s.array()) * du[li].array() + nu * sig * (Scalar(1) - sig) * ds.array()).matrix();
        } else {
          dh = du[li];
        }
        dI = dh * (Scalar(p.r_mem) * inv_tau);
        grads[li].noalias() += dI * tape.presynaptic[t][li].transpose();
        if (li > 0) {
          din.noalias() = synapses_[li].weights.transpose() * dI;
          const Eigen::Index n_pre = topology_.layers[li - 1].size;
          if (spec.with_previous_step) {
            ds_from_above = din.topRows(n_pre);
            delayed_next[li - 1] += din.bottomRows(n_pre);
          } else {
            ds_from_above = din;
          }
        }
        du[li] = dh * (Scalar(1) - inv_tau);
      }
    }
    return grads;
  }

 private:
  Topology topology_;
  SurrogateConfig surrogate_;
  SpikeFunction spike_function_ = SpikeFunction::heaviside;
  std::vector<DenseSynapses<Scalar>> synapses_;
};

using SpikingNetworkd = SpikingNetwork<double>;

/// PyTorch-style SGD: v <- m*v + g + wd*w ; w <- w - lr*v.
struct SgdMomentum {
  double lr = 0.01;
  double momentum = 0.5;
  double weight_decay = 0.0;
};

template <typename Scalar, typename Derived>
void sgd_momentum_update(DenseSynapses<Scalar>& syn, const Eigen::MatrixBase<Derived>& grad, const SgdMomentum& opt) {
  if (grad.rows() != syn.weights.rows() || grad.cols() != syn.weights.cols())
    throw Error("sgd_momentum_update: gradient shape mismatch");
  if (!grad.allFinite()) throw Error("sgd_momentum_update: non-finite gradient");
  syn.momentum_buffer = Scalar(opt.momentum) * syn.momentum_buffer + grad + Scalar(opt.weight_decay) * syn.weights;
  syn.weights -= Scalar(opt.lr) * syn.momentum_buffer;
}

template <typename Scalar>
void sgd_momentum_update(SpikingNetwork<Scalar>& net,
                         const std::vector<typename SpikingNetwork<Scalar>::Matrix>& grads,
                         const SgdMomentum& opt) {
  if (grads.size() != net.num_layers()) throw Error("sgd_momentum_update: gradient count mismatch");
  for (const auto& g : grads)
    if (!g.allFinite()) throw Error("sgd_momentum_update: non-finite gradient");
  for (std::size_t l = 0; l < grads.size(); ++l) sgd_momentum_update(net.synapses(l), grads[l], opt);
}

}  // namespace cbmc::snn
