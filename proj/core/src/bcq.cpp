#include "acsf/bcq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acsf {

namespace {

// Repeat each row of a (n, d) tensor k times -> (n*k, d) constant.
Tensor repeat_rows(const Tensor& t, std::size_t k) {
  const std::size_t n = t.rows(), d = t.cols();
  std::vector<double> out;
  out.reserve(n * k * d);
  auto v = t.values();
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < k; ++i)
      out.insert(out.end(), v.begin() + r * d, v.begin() + (r + 1) * d);
  return Tensor::from(Shape{n * k, d}, std::move(out));
}

}  // namespace

Tensor bcq_target(const std::vector<const Transition*>& batch,
                  VaeNetwork& vae, Approx& perturb_target,
                  Approx& critic1_target, Approx& critic2_target, double gamma,
                  double lambda, std::size_t n_samples, double max_action,
                  Rng& rng) {
  if (batch.empty()) throw std::logic_error("bcq_target: empty batch");
  if (n_samples == 0) throw std::logic_error("bcq_target: n_samples = 0");
  if (lambda < 0.0 || lambda > 1.0)
    throw std::domain_error("bcq_target: lambda outside [0, 1]");
  const std::size_t n = batch.size();

  Tensor next_rep = repeat_rows(pack_next_states(batch), n_samples);
  Tensor sampled = vae.decode_sampled(next_rep, rng).detach();
  Tensor delta = perturb_target.forward(concat_cols(next_rep, sampled));
  Tensor candidates =
      clamp(add(sampled, delta), -max_action, max_action).detach();

  Tensor sa = concat_cols(next_rep, candidates);
  Tensor q1 = critic1_target.forward(sa).detach();
  Tensor q2 = critic2_target.forward(sa).detach();

  auto rewards = pack_rewards(batch);
  auto not_done = pack_not_done(batch);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_samples; ++j) {
      const double a = q1.at(i * n_samples + j, 0);
      const double b = q2.at(i * n_samples + j, 0);
      const double mixed =
          lambda * std::min(a, b) + (1.0 - lambda) * std::max(a, b);
      best = std::max(best, mixed);
    }
    y[i] = rewards[i] + gamma * not_done[i] * best;
  }
  return Tensor::from(Shape{n, 1}, std::move(y));
}

BcqAgent::BcqAgent(VaeNetwork vae, std::unique_ptr<Approx> critic1,
                   std::unique_ptr<Approx> critic2,
                   std::unique_ptr<Approx> perturb, BcqConfig config)
    : config_(config),
      max_action_(config.max_action),
      vae_(std::move(vae)),
      critic1_(std::move(critic1)),
      critic2_(std::move(critic2)),
      critic1_t_(critic1_->clone(false)),
      critic2_t_(critic2_->clone(false)),
      perturb_(std::move(perturb)),
      perturb_t_(perturb_->clone(false)),
      vae_opt_(vae_.parameters(), config.learning_rate),
      critic_opt_([this] {
        auto p = critic1_->parameters();
        auto p2 = critic2_->parameters();
        p.insert(p.end(), p2.begin(), p2.end());
        return p;
      }(), config.learning_rate),
      perturb_opt_(perturb_->parameters(), config.learning_rate) {}

Tensor BcqAgent::perturbed_actions(const Tensor& states, const Tensor& sampled,
                                   Approx& perturb) {
  Tensor delta = perturb.forward(concat_cols(states, sampled));
  Tensor out = clamp(add(sampled, delta), -max_action_, max_action_);
  check_constraint(sampled, out);
  return out;
}

void BcqAgent::check_constraint(const Tensor& sampled,
                                const Tensor& perturbed) {
  const double phi_abs = config_.phi * max_action_;
  auto a = sampled.values();
  auto b = perturbed.values();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(b[i] - a[i]) > phi_abs + 1e-9) ++constraint_violations_;
}

BcqLosses BcqAgent::update(const ReplayBuffer& data, Rng& rng) {
  auto batch = data.sample(config_.batch_size, rng);
  BcqLosses losses;

  Tensor states = pack_states(batch);
  Tensor actions = pack_actions(batch);

  // Generative model step.
  vae_opt_.zero_grad();
  Tensor lg = vae_.loss(states, actions, rng);
  backward(lg);
  vae_opt_.step();
  losses.vae = lg.item();

  // Critic step against the mixed clipped-double-Q target.
  critic_opt_.zero_grad();
  Tensor y = bcq_target(batch, vae_, *perturb_t_, *critic1_t_, *critic2_t_,
                        config_.gamma, config_.lambda, config_.n_samples,
                        max_action_, rng);
  Tensor sa = concat_cols(states, actions);
  Tensor lq = add(scale(mean(square(sub(critic1_->forward(sa), y))), 0.5),
                  scale(mean(square(sub(critic2_->forward(sa), y))), 0.5));
  backward(lq);
  critic_opt_.step();
  losses.critic = lq.item();

  // Perturbation step: maximize Q1 over perturbed VAE candidates.
  perturb_opt_.zero_grad();
  Tensor sampled = vae_.decode_sampled(states, rng).detach();
  Tensor perturbed = perturbed_actions(states, sampled, *perturb_);
  Tensor lxi = neg(mean(critic1_->forward(concat_cols(states, perturbed))));
  backward(lxi);
  perturb_opt_.step();
  // Q1 received gradients from the perturbation loss; clear them.
  critic_opt_.zero_grad();
  losses.perturb = lxi.item();

  soft_update(critic1_t_->parameters(), critic1_->parameters(), config_.tau);
  soft_update(critic2_t_->parameters(), critic2_->parameters(), config_.tau);
  soft_update(perturb_t_->parameters(), perturb_->parameters(), config_.tau);
  return losses;
}

std::vector<double> BcqAgent::act(const std::vector<double>& state, Rng& rng) {
  Tensor state_rep = repeat_rows(pack_state(state), config_.n_samples);
  Tensor sampled = vae_.decode_sampled(state_rep, rng).detach();
  Tensor candidates = perturbed_actions(state_rep, sampled, *perturb_);
  Tensor q = critic1_->forward(concat_cols(state_rep, candidates));

  std::size_t best = 0;
  for (std::size_t i = 1; i < config_.n_samples; ++i)
    if (q.at(i, 0) > q.at(best, 0)) best = i;
  const std::size_t d = candidates.cols();
  auto v = candidates.values();
  return std::vector<double>(v.begin() + best * d, v.begin() + (best + 1) * d);
}

}  // namespace acsf
