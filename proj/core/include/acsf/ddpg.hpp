#pragma once

#include <memory>

#include "acsf/adam.hpp"
#include "acsf/approx.hpp"
#include "acsf/replay.hpp"

namespace acsf {

struct DdpgLosses {
  Tensor critic;  // mean squared TD error against the target networks
  Tensor actor;   // -mean Q(s, A(s))
};

/// Mean squared TD error against the detached target
/// r + gamma * (1 - done) * Q'(s', A'(s')).
Tensor ddpg_critic_loss(const std::vector<const Transition*>& batch,
                        Approx& critic, Approx& critic_target,
                        Approx& actor_target, double gamma);

/// -mean Q(s, A(s)); differentiates through the live critic into the actor.
Tensor ddpg_actor_loss(const Tensor& states, Approx& critic, Approx& actor);

/// Both losses over one batch (convenience used by the contract tests; the
/// agent steps the critic before rebuilding the actor loss).
DdpgLosses ddpg_losses(const std::vector<const Transition*>& batch,
                       Approx& critic, Approx& critic_target, Approx& actor,
                       Approx& actor_target, double gamma);

struct DdpgConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double learning_rate = 1e-4;
  std::size_t batch_size = 100;
  /// Exploration noise as a fraction of max_action.
  double exploration_noise = 0.1;
};

class DdpgAgent {
 public:
  DdpgAgent(std::unique_ptr<Approx> actor, std::unique_ptr<Approx> critic,
            DdpgConfig config);

  std::vector<double> act(const std::vector<double>& state, double noise_frac,
                          Rng& rng);
  double update(const ReplayBuffer& buffer, Rng& rng);

  Approx& actor() { return *actor_; }
  Approx& critic() { return *critic_; }
  const DdpgConfig& config() const { return config_; }

 private:
  DdpgConfig config_;
  std::unique_ptr<Approx> actor_;
  std::unique_ptr<Approx> actor_target_;
  std::unique_ptr<Approx> critic_;
  std::unique_ptr<Approx> critic_target_;
  AdamState actor_opt_;
  AdamState critic_opt_;
};

}  // namespace acsf
