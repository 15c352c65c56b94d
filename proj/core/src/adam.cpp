#include "acsf/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace acsf {

AdamState::AdamState(std::vector<Tensor> params, double lr, double beta1,
                     double beta2, double epsilon)
    : params_(std::move(params)),
      lr_(lr),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {
  moments_.resize(params_.size());
  lr_scale_.assign(params_.size(), 1.0);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    moments_[i].m.assign(params_[i].numel(), 0.0);
    moments_[i].v.assign(params_[i].numel(), 0.0);
  }
}

void AdamState::set_lr_scale(const std::vector<Tensor>& subset,
                             double multiplier) {
  for (const Tensor& t : subset)
    for (std::size_t i = 0; i < params_.size(); ++i)
      if (params_[i].id() == t.id()) lr_scale_[i] = multiplier;
}

void AdamState::step() {
  for (const Tensor& p : params_)
    if (!p.has_grad())
      throw std::logic_error("adam: parameter has no gradient; run backward "
                             "before stepping");
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, double(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, double(step_count_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    auto w = p.mutable_values();
    auto g = p.grad();
    auto& mo = moments_[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      mo.m[j] = beta1_ * mo.m[j] + (1.0 - beta1_) * g[j];
      mo.v[j] = beta2_ * mo.v[j] + (1.0 - beta2_) * g[j] * g[j];
      const double mhat = mo.m[j] / bc1;
      const double vhat = mo.v[j] / bc2;
      w[j] -= lr_ * mhat / (std::sqrt(vhat) + epsilon_);
    }
    p.zero_grad();
  }
}

void AdamState::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (params.size() != state.params().size())
    throw std::logic_error("adam_step: parameter list does not match state");
  state.step();
}

}  // namespace acsf
