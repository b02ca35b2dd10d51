#include "cbmc/snn/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cbmc::snn {

namespace {
constexpr const char* kFormat = "cbmc-snn-weights/1";
}

std::string dump_weights(const SpikingNetworkd& net, const std::map<std::string, std::string>& meta) {
  nlohmann::json doc;
  doc["format"] = kFormat;
  doc["meta"] = meta;
  doc["layers"] = nlohmann::json::array();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.synapses(l).weights;
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) data.push_back(w(i, j));
    doc["layers"].push_back({{"shape", {w.rows(), w.cols()}}, {"data", std::move(data)}});
  }
  return doc.dump();
}

std::map<std::string, std::string> restore_weights(SpikingNetworkd& net, const std::string& json_text,
                                                   const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(origin + ": " + e.what());
  }
  if (doc.value("format", "") != kFormat) throw Error(origin + ": not a " + std::string(kFormat) + " file");
  const auto& layers = doc.at("layers");
  if (layers.size() != net.num_layers())
    throw Error(origin + ": expected " + std::to_string(net.num_layers()) + " layers, found " +
                std::to_string(layers.size()));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& syn = net.synapses(l);
    const auto rows = layers[l].at("shape")[0].get<Eigen::Index>();
    const auto cols = layers[l].at("shape")[1].get<Eigen::Index>();
    if (rows != syn.weights.rows() || cols != syn.weights.cols())
      throw Error(origin + ": layer " + std::to_string(l) + " shape mismatch");
    const auto data = layers[l].at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
      throw Error(origin + ": layer " + std::to_string(l) + " has the wrong number of entries");
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) syn.weights(i, j) = data[static_cast<std::size_t>(i * cols + j)];
    if (!syn.weights.allFinite()) throw Error(origin + ": non-finite weight in layer " + std::to_string(l));
    syn.momentum_buffer.setZero();
  }
  return doc.value("meta", std::map<std::string, std::string>{});
}

void save_weights(const SpikingNetworkd& net, const std::filesystem::path& path,
                  const std::map<std::string, std::string>& meta) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write weights to " + path.string());
  out << dump_weights(net, meta) << "\n";
  if (!out) throw Error("write failed for " + path.string());
}

std::map<std::string, std::string> load_weights(SpikingNetworkd& net, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open weights file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return restore_weights(net, ss.str(), path.string());
}

}  // namespace cbmc::snn
