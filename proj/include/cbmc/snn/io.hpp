#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "cbmc/snn/network.hpp"

namespace cbmc::snn {

/// JSON tensor dump: {"format", "layers": [{"shape": [post, pre], "data": [...]}],
/// "meta": {...}}. Data is row-major; doubles are written round-trip exact.
std::string dump_weights(const SpikingNetworkd& net, const std::map<std::string, std::string>& meta = {});

/// Restores weights into a network of the same topology; returns the meta block.
std::map<std::string, std::string> restore_weights(SpikingNetworkd& net, const std::string& json_text,
                                                   const std::string& origin = "<string>");

void save_weights(const SpikingNetworkd& net, const std::filesystem::path& path,
                  const std::map<std::string, std::string>& meta = {});
std::map<std::string, std::string> load_weights(SpikingNetworkd& net, const std::filesystem::path& path);

}  // namespace cbmc::snn
