#include "acsf/replay.hpp"

#include <stdexcept>

namespace acsf {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer: capacity 0");
  storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[write_pos_] = std::move(t);
  }
  write_pos_ = (write_pos_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch,
                                                    Rng& rng) const {
  if (storage_.empty())
    throw std::logic_error("replay buffer: sample from empty buffer");
  std::vector<const Transition*> out(batch);
  for (std::size_t i = 0; i < batch; ++i)
    out[i] = &storage_[rng.uniform_index(storage_.size())];
  return out;
}

namespace {
Tensor pack_rows(const std::vector<const Transition*>& batch,
                 const std::vector<double> Transition::* field) {
  if (batch.empty()) throw std::logic_error("batch packing: empty batch");
  const std::size_t n = batch.size();
  const std::size_t dim = (batch[0]->*field).size();
  std::vector<double> v;
  v.reserve(n * dim);
  for (const Transition* t : batch) {
    const auto& row = t->*field;
    if (row.size() != dim)
      throw std::invalid_argument("batch packing: inconsistent dimensions");
    v.insert(v.end(), row.begin(), row.end());
  }
  return Tensor::from(Shape{n, dim}, std::move(v));
}
}  // namespace

Tensor pack_states(const std::vector<const Transition*>& batch) {
  return pack_rows(batch, &Transition::state);
}

Tensor pack_next_states(const std::vector<const Transition*>& batch) {
  return pack_rows(batch, &Transition::next_state);
}

Tensor pack_actions(const std::vector<const Transition*>& batch) {
  return pack_rows(batch, &Transition::action);
}

std::vector<std::size_t> pack_action_indices(
    const std::vector<const Transition*>& batch) {
  std::vector<std::size_t> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    out[i] = batch[i]->action_index;
  return out;
}

std::vector<double> pack_rewards(const std::vector<const Transition*>& batch) {
  std::vector<double> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) out[i] = batch[i]->reward;
  return out;
}

std::vector<double> pack_not_done(const std::vector<const Transition*>& batch) {
  std::vector<double> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i)
    out[i] = batch[i]->done ? 0.0 : 1.0;
  return out;
}

Tensor pack_state(const std::vector<double>& state) {
  return Tensor::from(Shape{1, state.size()},
                      std::vector<double>(state.begin(), state.end()));
}

}  // namespace acsf
