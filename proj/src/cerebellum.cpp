#include "cbmc/cerebellum.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cbmc/snn/io.hpp"

namespace cbmc::cerebellum {

snn::Topology topology() {
  snn::Topology t;
  t.input_size = kJoints;
  t.layers = {
      {kGranule, snn::LifParams::spiking(10.0, 0.0, 0.1), false},
      {kPurkinje, snn::LifParams::spiking(10.0, 0.0, 0.1), true},
      {kNuclei, snn::LifParams::non_spiking(5.0, 0.0), false},
  };
  return t;
}

CerebellumNet CerebellumNet::create(std::uint64_t seed) {
  CerebellumNet net;
  net.network = snn::SpikingNetworkd(topology(), snn::SurrogateConfig{5.0});
  net.network.initialize(seed);
  return net;
}

JointVectord encode_positions(const JointVectord& q, const arm::ArmModel& model) {
  const JointVectord lo = model.lower_limits(), hi = model.upper_limits();
  const JointVectord mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  return ((q - mid).cwiseQuotient(half)).cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::MatrixXd decode_groups(const Eigen::MatrixXd& dcn) {
  if (dcn.rows() != kNuclei) throw Error("decode_groups: expected 140 DCN potentials");
  Eigen::MatrixXd out(kJoints, dcn.cols());
  for (int i = 0; i < kJoints; ++i) out.row(i) = dcn.middleRows(i * kGroup, kGroup).colwise().mean();
  return out;
}

namespace {

Eigen::MatrixXd encode_batch(const arm::ArmModel& model, const Eigen::MatrixXd& q) {
  if (q.rows() != kJoints) throw Error("cerebellum: configurations must have 7 rows");
  Eigen::MatrixXd x(kJoints, q.cols());
  for (Eigen::Index b = 0; b < q.cols(); ++b) x.col(b) = encode_positions(q.col(b), model);
  return x;
}

}  // namespace

Eigen::MatrixXd forward(const CerebellumNet& net, const arm::ArmModel& model, const Eigen::MatrixXd& q) {
  return decode_groups(net.network.run_window(encode_batch(model, q), kWindow));
}

JointVectord predict(const CerebellumNet& net, const arm::ArmModel& model, const JointVectord& q) {
  if (!net.trained) throw Error("cerebellum predict: network is not trained");
  return forward(net, model, q);
}

TrainingReport train_pattern(CerebellumNet& net, const arm::ArmModel& model,
                             const std::vector<trajectories::JointTrajectory>& data, const arm::LoadSpec& load,
                             const TrainingOptions& opt, const EpochCallback& on_epoch) {
  if (opt.batch < 1) throw Error("train_pattern: batch must be >= 1");
  if (opt.epochs < 0) throw Error("train_pattern: negative epoch count");
  TrainingReport report;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const snn::SgdMomentum sgd{opt.lr, opt.momentum, 0.0};

  // Oracle torques do not change between epochs; only the noise does.
  std::vector<Eigen::MatrixXd> inputs, targets;
  for (const auto& traj : data) {
    Eigen::MatrixXd q(kJoints, static_cast<Eigen::Index>(traj.size()));
    Eigen::MatrixXd tau(kJoints, q.cols());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      q.col(static_cast<Eigen::Index>(k)) = traj.q[k];
      tau.col(static_cast<Eigen::Index>(k)) = arm::gravity_torque(model, traj.q[k], load);
    }
    inputs.push_back(encode_batch(model, q));
    targets.push_back(std::move(tau));
  }

  snn::WindowTape<double> tape;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t d = 0; d < inputs.size(); ++d) {
      const Eigen::Index n = inputs[d].cols();
      for (Eigen::Index start = 0; start < n; start += opt.batch) {
        const Eigen::Index b = std::min<Eigen::Index>(opt.batch, n - start);
        Eigen::MatrixXd y = targets[d].middleCols(start, b);
        if (opt.noise_sigma > 0.0)
          for (Eigen::Index j = 0; j < b; ++j)
            for (int i = 0; i < kJoints; ++i) y(i, j) += opt.noise_sigma * noise(rng);

        const Eigen::MatrixXd dcn = net.network.run_window(inputs[d].middleCols(start, b), kWindow, &tape);
        const Eigen::MatrixXd err = decode_groups(dcn) - y;
        const double loss = err.squaredNorm() / static_cast<double>(err.size());
        if (!std::isfinite(loss)) throw Error("train_pattern: loss diverged in epoch " + std::to_string(epoch));

        // d(mean squared error)/d(group mean), spread evenly over the group.
        Eigen::MatrixXd grad(kNuclei, b);
        const double scale = 2.0 / static_cast<double>(err.size()) / static_cast<double>(kGroup);
        for (int i = 0; i < kJoints; ++i) grad.middleRows(i * kGroup, kGroup).rowwise() = scale * err.row(i);
        snn::sgd_momentum_update(net.network, net.network.backprop_window(tape, grad), sgd);
        loss_sum += loss;
        ++batches;
      }
    }
    const double mean = batches ? loss_sum / batches : 0.0;
    report.epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  net.trained = true;
  net.load_mass = load.mass;
  return report;
}

void PatternSet::validate() const {
  if (!light.trained || !heavy.trained) throw Error("PatternSet: both patterns must be trained");
  if (light_mass == heavy_mass) throw Error("PatternSet: pattern masses must differ");
}

CompensationMatrixd predict_matrix(const PatternSet& patterns, const arm::ArmModel& model, const JointVectord& q) {
  patterns.validate();
  CompensationMatrixd T;
  T.col(0) = predict(patterns.light, model, q);
  T.col(1) = predict(patterns.heavy, model, q);
  return T;
}

std::vector<trajectories::JointTrajectory> training_trajectories(const arm::ArmModel& model) {
  return {trajectories::plan_joint_trajectory(model, trajectories::training_horizontal_circle(), 1e-3, 0.0),
          trajectories::plan_joint_trajectory(model, trajectories::training_inclined_circle(), 1e-3, 0.0)};
}

void save_pattern(const CerebellumNet& net, const std::filesystem::path& path) {
  std::ostringstream mass;
  mass.precision(17);
  mass << net.load_mass;
  snn::save_weights(net.network, path,
                    {{"module", "cerebellum"}, {"load_mass", mass.str()}, {"trained", net.trained ? "1" : "0"}});
}

CerebellumNet load_pattern(const std::filesystem::path& path) {
  CerebellumNet net = CerebellumNet::create(0);
  const auto meta = snn::load_weights(net.network, path);
  auto it = meta.find("module");
  if (it == meta.end() || it->second != "cerebellum") throw Error(path.string() + ": not a cerebellum pattern");
  net.load_mass = std::stod(meta.at("load_mass"));
  net.trained = meta.count("trained") && meta.at("trained") == "1";
  return net;
}

}  // namespace cbmc::cerebellum
