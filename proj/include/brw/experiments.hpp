#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace brw::experiments {

/// Identity of one reproducible run: the master seed and the hash of the
/// effective configuration. Both are stamped into every output row.
struct RunContext {
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ExperimentResult {
  bool pass = true;
  nlohmann::json summary;
  /// filename -> file contents (CSV), written by the CLI runner
  std::vector<std::pair<std::string, std::string>> artifacts;
};

using Runner = ExperimentResult (*)(const nlohmann::json& params,
                                    const RunContext& ctx);

struct Info {
  std::string description;
  Runner run = nullptr;
};

/// name -> runner for every named experiment.
const std::map<std::string, Info>& registry();

/// FNV-1a hash of the canonical JSON dump, hex-encoded.
std::string config_hash(const nlohmann::json& config);

}  // namespace brw::experiments
