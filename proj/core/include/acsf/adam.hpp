#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "acsf/tensor.hpp"

namespace acsf {

/// Adam optimizer state over a fixed parameter list. Moments are keyed by
/// parameter identity and match each parameter's shape.
class AdamState {
 public:
  explicit AdamState(std::vector<Tensor> params, double lr = 1e-3,
                     double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8);

  /// One bias-corrected Adam update. Every parameter must carry a populated
  /// gradient; gradients are zeroed after the update.
  void step();

  /// Per-parameter learning-rate multiplier (matched by tensor identity).
  void set_lr_scale(const std::vector<Tensor>& subset, double multiplier);

  /// Zero the gradients of all managed parameters.
  void zero_grad();

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  std::uint64_t step_count() const { return step_count_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
  };
  std::vector<Tensor> params_;
  std::vector<Moments> moments_;
  std::vector<double> lr_scale_;
  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::uint64_t step_count_ = 0;
};

/// Functional form used by the spec-level contract: one Adam update over
/// `params` driven by `state`.
void adam_step(std::vector<Tensor>& params, AdamState& state);

}  // namespace acsf
