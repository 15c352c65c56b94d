#pragma once

#include <memory>

#include "acsf/adam.hpp"
#include "acsf/approx.hpp"
#include "acsf/replay.hpp"

namespace acsf {

/// Behavioral cloning loss: 0.5 * mean over the batch of the squared error
/// summed over action dimensions.
Tensor bc_loss(const std::vector<const Transition*>& batch, Approx& policy);

struct BcConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 100;
};

class BcAgent {
 public:
  BcAgent(std::unique_ptr<Approx> policy, BcConfig config);

  double update(const ReplayBuffer& data, Rng& rng);
  std::vector<double> act(const std::vector<double>& state);

  Approx& policy() { return *policy_; }
  const BcConfig& config() const { return config_; }

 private:
  BcConfig config_;
  std::unique_ptr<Approx> policy_;
  AdamState opt_;
};

}  // namespace acsf
