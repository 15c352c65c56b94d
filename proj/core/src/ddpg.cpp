#include "acsf/ddpg.hpp"

#include <algorithm>
#include <stdexcept>

namespace acsf {

Tensor ddpg_critic_loss(const std::vector<const Transition*>& batch,
                        Approx& critic, Approx& critic_target,
                        Approx& actor_target, double gamma) {
  if (batch.empty()) throw std::logic_error("ddpg: empty batch");
  const std::size_t n = batch.size();
  Tensor next_states = pack_next_states(batch);
  Tensor next_actions = actor_target.forward(next_states).detach();
  Tensor next_q =
      critic_target.forward(concat_cols(next_states, next_actions)).detach();
  auto rewards = pack_rewards(batch);
  auto not_done = pack_not_done(batch);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = rewards[i] + gamma * not_done[i] * next_q.at(i, 0);

  Tensor q =
      critic.forward(concat_cols(pack_states(batch), pack_actions(batch)));
  return mean(square(sub(q, Tensor::from(Shape{n, 1}, std::move(y)))));
}

Tensor ddpg_actor_loss(const Tensor& states, Approx& critic, Approx& actor) {
  if (actor.config().head != HeadKind::action)
    throw std::logic_error("ddpg: continuous action head required");
  Tensor actions = actor.forward(states);
  return neg(mean(critic.forward(concat_cols(states, actions))));
}

DdpgLosses ddpg_losses(const std::vector<const Transition*>& batch,
                       Approx& critic, Approx& critic_target, Approx& actor,
                       Approx& actor_target, double gamma) {
  Tensor lq = ddpg_critic_loss(batch, critic, critic_target, actor_target,
                               gamma);
  Tensor la = ddpg_actor_loss(pack_states(batch), critic, actor);
  return {lq, la};
}

DdpgAgent::DdpgAgent(std::unique_ptr<Approx> actor,
                     std::unique_ptr<Approx> critic, DdpgConfig config)
    : config_(config),
      actor_(std::move(actor)),
      actor_target_(actor_->clone(false)),
      critic_(std::move(critic)),
      critic_target_(critic_->clone(false)),
      actor_opt_(actor_->parameters(), config.learning_rate),
      critic_opt_(critic_->parameters(), config.learning_rate) {}

std::vector<double> DdpgAgent::act(const std::vector<double>& state,
                                   double noise_frac, Rng& rng) {
  const double max_action = actor_->config().max_action;
  Tensor a = actor_->forward(pack_state(state));
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& x : out) {
    if (noise_frac > 0.0) x += rng.normal(0.0, noise_frac * max_action);
    x = std::clamp(x, -max_action, max_action);
  }
  return out;
}

double DdpgAgent::update(const ReplayBuffer& buffer, Rng& rng) {
  auto batch = buffer.sample(config_.batch_size, rng);

  critic_opt_.zero_grad();
  Tensor critic_loss = ddpg_critic_loss(batch, *critic_, *critic_target_,
                                        *actor_target_, config_.gamma);
  backward(critic_loss);
  critic_opt_.step();

  actor_opt_.zero_grad();
  Tensor actor_loss = ddpg_actor_loss(pack_states(batch), *critic_, *actor_);
  backward(actor_loss);
  actor_opt_.step();
  // The actor loss also deposited gradients in the critic; drop them so the
  // next critic update starts clean.
  critic_opt_.zero_grad();

  soft_update(critic_target_->parameters(), critic_->parameters(),
              config_.tau);
  soft_update(actor_target_->parameters(), actor_->parameters(), config_.tau);
  return critic_loss.item();
}

}  // namespace acsf
