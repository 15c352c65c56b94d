#include "acsf/dqn.hpp"

#include <stdexcept>

namespace acsf {

std::size_t epsilon_greedy(const Tensor& q_row, double epsilon, Rng& rng) {
  if (q_row.numel() == 0) throw std::logic_error("epsilon_greedy: empty q");
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::domain_error("epsilon_greedy: epsilon outside [0, 1]");
  const std::size_t n = q_row.cols();
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_index(n);
  return argmax_row(q_row, 0);
}

Tensor dqn_loss(const std::vector<const Transition*>& batch, Approx& q,
                Approx& q_target, double gamma) {
  if (batch.empty()) throw std::logic_error("dqn_loss: empty batch");
  const std::size_t n = batch.size();

  // Target values, no gradient: r + gamma * (1 - done) * max_a' Q'(s', a').
  Tensor next_q = q_target.forward(pack_next_states(batch)).detach();
  auto rewards = pack_rewards(batch);
  auto not_done = pack_not_done(batch);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = rewards[i] + gamma * not_done[i] * max_row(next_q, i);

  Tensor q_all = q.forward(pack_states(batch));
  Tensor q_sel = select_per_row(q_all, pack_action_indices(batch));
  Tensor td = sub(q_sel, Tensor::from(Shape{n, 1}, std::move(y)));
  return mean(smooth_l1(td));
}

DqnAgent::DqnAgent(std::unique_ptr<Approx> q, DqnConfig config)
    : config_(config),
      q_(std::move(q)),
      q_target_(q_->clone(false)),
      opt_(q_->parameters(), config.learning_rate) {}

std::size_t DqnAgent::act(const std::vector<double>& state, double epsilon,
                          Rng& rng) {
  Tensor q_row = q_->forward(pack_state(state));
  return epsilon_greedy(q_row, epsilon, rng);
}

double DqnAgent::update(const ReplayBuffer& buffer, Rng& rng) {
  auto batch = buffer.sample(config_.batch_size, rng);
  opt_.zero_grad();
  Tensor loss = dqn_loss(batch, *q_, *q_target_, config_.gamma);
  backward(loss);
  opt_.step();
  ++updates_;
  if (updates_ % config_.target_copy_period == 0)
    soft_update(q_target_->parameters(), q_->parameters(), 1.0);
  return loss.item();
}

}  // namespace acsf
