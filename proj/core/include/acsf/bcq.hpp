#pragma once

#include <memory>

#include "acsf/adam.hpp"
#include "acsf/approx.hpp"
#include "acsf/replay.hpp"
#include "acsf/vae.hpp"

namespace acsf {

struct BcqConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double lambda = 0.75;       // clipped double-Q mixing weight
  std::size_t n_samples = 10;  // candidate actions per state
  double phi = 1.0;           // perturbation range as a fraction of max_action
  double max_action = 1.0;    // environment action bound
  double learning_rate = 1e-4;
  std::size_t batch_size = 100;
};

/// Detached learning target: for each next state, draw n candidate actions
/// from the VAE, perturb them with the target perturbation network, clip to
/// the action bounds, score with both target critics,
///   y = r + gamma * (1 - done) * max_i [lambda * Qmin(a_i)
///                                       + (1 - lambda) * Qmax(a_i)].
Tensor bcq_target(const std::vector<const Transition*>& batch,
                  VaeNetwork& vae, Approx& perturb_target,
                  Approx& critic1_target, Approx& critic2_target, double gamma,
                  double lambda, std::size_t n_samples, double max_action,
                  Rng& rng);

struct BcqLosses {
  double vae = 0.0;
  double critic = 0.0;
  double perturb = 0.0;
};

class BcqAgent {
 public:
  BcqAgent(VaeNetwork vae, std::unique_ptr<Approx> critic1,
           std::unique_ptr<Approx> critic2, std::unique_ptr<Approx> perturb,
           BcqConfig config);

  /// One offline iteration: VAE step, critic step on the mixed target,
  /// perturbation step, then soft target updates.
  BcqLosses update(const ReplayBuffer& data, Rng& rng);

  /// Greedy over perturbed VAE candidates under the live critic.
  std::vector<double> act(const std::vector<double>& state, Rng& rng);

  Approx& critic1() { return *critic1_; }
  Approx& critic2() { return *critic2_; }
  Approx& perturb() { return *perturb_; }
  VaeNetwork& vae() { return vae_; }
  const BcqConfig& config() const { return config_; }

  /// Count of emitted or evaluated actions farther than phi from their VAE
  /// candidate (should stay zero; kept as a cheap online invariant check).
  std::size_t constraint_violations() const { return constraint_violations_; }

 private:
  Tensor perturbed_actions(const Tensor& states, const Tensor& sampled,
                           Approx& perturb);
  void check_constraint(const Tensor& sampled, const Tensor& perturbed);

  BcqConfig config_;
  double max_action_;
  VaeNetwork vae_;
  std::unique_ptr<Approx> critic1_, critic2_;
  std::unique_ptr<Approx> critic1_t_, critic2_t_;
  std::unique_ptr<Approx> perturb_, perturb_t_;
  AdamState vae_opt_;
  AdamState critic_opt_;
  AdamState perturb_opt_;
  std::size_t constraint_violations_ = 0;
};

}  // namespace acsf
