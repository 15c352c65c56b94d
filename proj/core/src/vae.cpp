#include "acsf/vae.hpp"

#include <stdexcept>

#include "acsf/spiking_mlp.hpp"

namespace acsf {

namespace {
constexpr double kLogSigMin = -4.0;
constexpr double kLogSigMax = 15.0;
}

void VaeConfig::validate() const {
  if (state_dim == 0 || action_dim == 0 || latent_dim == 0)
    throw std::invalid_argument("vae: zero dimension");
  if (hidden.empty()) throw std::invalid_argument("vae: no hidden layers");
}

VaeNetwork::VaeNetwork(VaeConfig config, Rng& init_rng)
    : config_(std::move(config)) {
  config_.validate();
  std::size_t fan_in = config_.state_dim + config_.action_dim;
  for (std::size_t w : config_.hidden) {
    enc_w_.push_back(init_linear_weight(fan_in, w, init_rng));
    const double bound = 1.0 / std::sqrt(double(fan_in));
    enc_b_.push_back(Tensor::from(
        Shape{w}, init_rng.uniform_vector(w, -bound, bound), true));
    fan_in = w;
  }
  mu_w_ = init_linear_weight(fan_in, config_.latent_dim, init_rng);
  mu_b_ = Tensor::zeros(Shape{config_.latent_dim}, true);
  logsig_w_ = init_linear_weight(fan_in, config_.latent_dim, init_rng);
  logsig_b_ = Tensor::zeros(Shape{config_.latent_dim}, true);

  decoder_ = std::make_unique<Mlp>(
      MlpConfig{config_.state_dim + config_.latent_dim, config_.hidden,
                config_.action_dim, Activation::relu},
      init_rng);
}

Tensor VaeNetwork::trunk_forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t l = 0; l < enc_w_.size(); ++l)
    h = relu(add_row(matmul(h, enc_w_[l]), enc_b_[l]));
  return h;
}

std::pair<Tensor, Tensor> VaeNetwork::encode(const Tensor& states,
                                             const Tensor& actions) {
  Tensor h = trunk_forward(concat_cols(states, actions));
  Tensor mu = add_row(matmul(h, mu_w_), mu_b_);
  Tensor log_sigma =
      clamp(add_row(matmul(h, logsig_w_), logsig_b_), kLogSigMin, kLogSigMax);
  return {mu, log_sigma};
}

Tensor VaeNetwork::decode(const Tensor& states, const Tensor& z) {
  Tensor raw = decoder_->forward(concat_cols(states, z));
  return scale(tanh(raw), config_.max_action);
}

Tensor VaeNetwork::decode_sampled(const Tensor& states, Rng& rng) {
  const std::size_t n = states.rows();
  std::vector<double> z(n * config_.latent_dim);
  for (double& x : z)
    x = std::clamp(0.5 * rng.normal(), -0.5, 0.5);
  return decode(states,
                Tensor::from(Shape{n, config_.latent_dim}, std::move(z)));
}

Tensor VaeNetwork::loss(const Tensor& states, const Tensor& actions,
                        Rng& rng) {
  const std::size_t n = states.rows();
  auto [mu, log_sigma] = encode(states, actions);
  Tensor sigma = exp(log_sigma);

  std::vector<double> eps(n * config_.latent_dim);
  for (double& x : eps) x = rng.normal();
  Tensor z = add(mu, mul(sigma, Tensor::from(Shape{n, config_.latent_dim},
                                             std::move(eps))));
  Tensor recon = decode(states, z);
  Tensor recon_loss = scale(sum(square(sub(recon, actions))), 1.0 / double(n));

  // Diagonal-Gaussian KL against N(0, I):
  // 0.5 * (mu^2 + sigma^2 - 2 log sigma - 1) summed over latent dims.
  Tensor kl_terms = sub(sub(add(square(mu), square(sigma)),
                            scale(log_sigma, 2.0)),
                        Tensor::scalar(1.0));
  Tensor kl = scale(sum(kl_terms), 0.5 / double(n));
  return add(recon_loss, kl);
}

std::vector<Tensor> VaeNetwork::parameters() {
  std::vector<Tensor> p;
  for (std::size_t l = 0; l < enc_w_.size(); ++l) {
    p.push_back(enc_w_[l]);
    p.push_back(enc_b_[l]);
  }
  p.push_back(mu_w_);
  p.push_back(mu_b_);
  p.push_back(logsig_w_);
  p.push_back(logsig_b_);
  auto dp = decoder_->parameters();
  p.insert(p.end(), dp.begin(), dp.end());
  return p;
}

VaeNetwork VaeNetwork::clone(bool trainable) const {
  VaeNetwork copy(config_);
  for (const Tensor& w : enc_w_) copy.enc_w_.push_back(w.clone(trainable));
  for (const Tensor& b : enc_b_) copy.enc_b_.push_back(b.clone(trainable));
  copy.mu_w_ = mu_w_.clone(trainable);
  copy.mu_b_ = mu_b_.clone(trainable);
  copy.logsig_w_ = logsig_w_.clone(trainable);
  copy.logsig_b_ = logsig_b_.clone(trainable);
  copy.decoder_ = std::make_unique<Mlp>(decoder_->clone(trainable));
  return copy;
}

Tensor vae_loss(const std::vector<const Transition*>& batch, VaeNetwork& vae,
                Rng& rng) {
  if (batch.empty()) throw std::logic_error("vae_loss: empty batch");
  return vae.loss(pack_states(batch), pack_actions(batch), rng);
}

}  // namespace acsf
