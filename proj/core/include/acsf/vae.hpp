#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "acsf/mlp.hpp"
#include "acsf/replay.hpp"
#include "acsf/rng.hpp"
#include "acsf/tensor.hpp"

namespace acsf {

struct VaeConfig {
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  std::size_t latent_dim = 0;
  std::vector<std::size_t> hidden{750, 750};
  double max_action = 1.0;

  void validate() const;
};

/// Conditional VAE over dataset actions: the encoder maps (s, a) to a
/// diagonal Gaussian in latent space, the decoder maps (s, z) back to a
/// bounded action. Used by the batch-constrained learner as its generative
/// action model.
class VaeNetwork {
 public:
  VaeNetwork(VaeConfig config, Rng& init_rng);

  /// Returns (mu, log_sigma); log_sigma is clamped to [-4, 15] for numeric
  /// stability, so sigma = exp(log_sigma) stays strictly positive.
  std::pair<Tensor, Tensor> encode(const Tensor& states,
                                   const Tensor& actions);

  /// Decode latent codes into bounded actions (tanh scaled).
  Tensor decode(const Tensor& states, const Tensor& z);

  /// Decode with latent codes drawn from the clipped prior
  /// z = clamp(0.5 * N(0, 1), -0.5, 0.5); no gradient flows through z.
  Tensor decode_sampled(const Tensor& states, Rng& rng);

  /// Reconstruction plus KL:
  ///   sum_dims (a - a~)^2 averaged over the batch
  ///   + mean over batch of sum_i 0.5 (mu_i^2 + sigma_i^2 - 2 log sigma_i - 1)
  /// with the reparameterized sample z = mu + sigma * eps.
  Tensor loss(const Tensor& states, const Tensor& actions, Rng& rng);

  std::vector<Tensor> parameters();
  const VaeConfig& config() const { return config_; }
  VaeNetwork clone(bool trainable) const;

 private:
  explicit VaeNetwork(VaeConfig config) : config_(std::move(config)) {}
  Tensor trunk_forward(const Tensor& x) const;

  VaeConfig config_;
  // Encoder trunk with activations after every layer, then two linear heads.
  std::vector<Tensor> enc_w_, enc_b_;
  Tensor mu_w_, mu_b_;
  Tensor logsig_w_, logsig_b_;
  std::unique_ptr<Mlp> decoder_;
};

/// Contract-level wrapper over VaeNetwork::loss for transition batches.
Tensor vae_loss(const std::vector<const Transition*>& batch, VaeNetwork& vae,
                Rng& rng);

}  // namespace acsf
