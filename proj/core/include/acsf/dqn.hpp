#pragma once

#include <memory>

#include "acsf/adam.hpp"
#include "acsf/approx.hpp"
#include "acsf/replay.hpp"

namespace acsf {

/// Epsilon-greedy over one row of Q-values; ties break to the lowest index.
std::size_t epsilon_greedy(const Tensor& q_row, double epsilon, Rng& rng);

/// Smooth-L1 temporal-difference loss,
///   L = smooth_L1(r + gamma * (1 - done) * max_a' Q_target(s', a')
///       - Q(s, a)),
/// averaged over the batch. The target branch carries no gradient.
Tensor dqn_loss(const std::vector<const Transition*>& batch, Approx& q,
                Approx& q_target, double gamma);

struct DqnConfig {
  double gamma = 0.99;
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;
  /// Hard target copy period in gradient steps (tau = 1 interpreted as a
  /// periodic exact copy).
  std::size_t target_copy_period = 1000;
};

class DqnAgent {
 public:
  DqnAgent(std::unique_ptr<Approx> q, DqnConfig config);

  std::size_t act(const std::vector<double>& state, double epsilon, Rng& rng);
  /// One gradient step on a sampled batch; refreshes the target on schedule.
  double update(const ReplayBuffer& buffer, Rng& rng);

  Approx& q() { return *q_; }
  Approx& q_target() { return *q_target_; }
  const DqnConfig& config() const { return config_; }
  std::size_t updates() const { return updates_; }

 private:
  DqnConfig config_;
  std::unique_ptr<Approx> q_;
  std::unique_ptr<Approx> q_target_;
  AdamState opt_;
  std::size_t updates_ = 0;
};

}  // namespace acsf
