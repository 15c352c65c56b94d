#pragma once

#include <cstdint>
#include <vector>

#include "acsf/rng.hpp"
#include "acsf/tensor.hpp"

namespace acsf {

/// One environment step. Discrete tasks use action_index; continuous tasks
/// use the action vector.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  std::uint32_t action_index = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

/// Uniform-sampling ring buffer; oldest entries are evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return storage_[i]; }

  std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t write_pos_ = 0;
  std::vector<Transition> storage_;
};

// Batch packing helpers (constant tensors, no gradient tracking).
Tensor pack_states(const std::vector<const Transition*>& batch);
Tensor pack_next_states(const std::vector<const Transition*>& batch);
Tensor pack_actions(const std::vector<const Transition*>& batch);
std::vector<std::size_t> pack_action_indices(
    const std::vector<const Transition*>& batch);
std::vector<double> pack_rewards(const std::vector<const Transition*>& batch);
std::vector<double> pack_not_done(const std::vector<const Transition*>& batch);

/// Row-major (1, n) tensor view of a single state.
Tensor pack_state(const std::vector<double>& state);

}  // namespace acsf
