#include "acsf/bc.hpp"

#include <algorithm>
#include <stdexcept>

namespace acsf {

Tensor bc_loss(const std::vector<const Transition*>& batch, Approx& policy) {
  if (batch.empty()) throw std::logic_error("bc_loss: empty batch");
  Tensor pred = policy.forward(pack_states(batch));
  Tensor err = square(sub(pred, pack_actions(batch)));
  return scale(sum(err), 0.5 / double(batch.size()));
}

BcAgent::BcAgent(std::unique_ptr<Approx> policy, BcConfig config)
    : config_(config),
      policy_(std::move(policy)),
      opt_(policy_->parameters(), config.learning_rate) {}

double BcAgent::update(const ReplayBuffer& data, Rng& rng) {
  auto batch = data.sample(config_.batch_size, rng);
  opt_.zero_grad();
  Tensor loss = bc_loss(batch, *policy_);
  backward(loss);
  opt_.step();
  return loss.item();
}

std::vector<double> BcAgent::act(const std::vector<double>& state) {
  const double max_action = policy_->config().max_action;
  Tensor a = policy_->forward(pack_state(state));
  std::vector<double> out(a.values().begin(), a.values().end());
  // The cloning network's head may be linear (conventional variant); clip to
  // the action bounds at execution time.
  for (double& x : out) x = std::clamp(x, -max_action, max_action);
  return out;
}

}  // namespace acsf
