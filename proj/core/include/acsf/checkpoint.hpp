#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "acsf/run_config.hpp"
#include "acsf/tensor.hpp"

namespace acsf {

/// Trained-model snapshot: the resolved run configuration plus every live
/// network's parameter tensors in construction order. Rebuilding the agent
/// from the embedded config and restoring values in order reproduces the
/// policy exactly.
struct Checkpoint {
  RunConfig config;
  std::map<std::string, std::vector<Tensor>> networks;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace acsf
