#include "acsf/lif.hpp"

#include <cmath>
#include <stdexcept>

namespace acsf {

void LifParams::validate() const {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("lif: beta must be in (0, 1]");
  if (!(alpha > 0.0)) throw std::domain_error("lif: alpha must be > 0");
  if (!(v_threshold > v_reset))
    throw std::domain_error("lif: v_threshold must exceed v_reset");
}

LifState lif_initial_state(std::size_t batch, std::size_t width,
                           const LifParams& params) {
  LifState s;
  s.h = Tensor::full(Shape{batch, width}, params.v_reset);
  s.v = Tensor::full(Shape{batch, width}, params.v_reset);
  return s;
}

std::pair<Tensor, LifState> lif_step(const Tensor& input_current,
                                     const LifState& state,
                                     const LifParams& params, FireMode mode) {
  if (input_current.shape() != state.h.shape())
    throw std::invalid_argument("lif_step: input shape " +
                                shape_str(input_current.shape()) +
                                " does not match state " +
                                shape_str(state.h.shape()));
  Tensor v = add(scale(state.h, params.beta), input_current);
  Tensor o = spike_fire(v, params.v_threshold, params.alpha, mode);
  // H_t = V_t * (1 - O_t) + V_reset, applied unconditionally.
  Tensor h = mul(v, sub(Tensor::scalar(1.0), o));
  if (params.v_reset != 0.0) h = add(h, Tensor::scalar(params.v_reset));
  return {o, LifState{h, v}};
}

Tensor lif_integrate(const Tensor& input_current, const Tensor& prev_v,
                     double beta) {
  return add(scale(prev_v, beta), input_current);
}

double psp_kernel(double dt, double tau_m, double tau_s, double v0) {
  if (!(tau_m > 0.0) || !(tau_s > 0.0))
    throw std::domain_error("psp_kernel: time constants must be positive");
  if (!(tau_m > tau_s))
    throw std::domain_error("psp_kernel: requires tau_m > tau_s");
  if (dt < 0.0) throw std::domain_error("psp_kernel: dt must be >= 0");
  return v0 * (std::exp(-dt / tau_m) - std::exp(-dt / tau_s));
}

}  // namespace acsf
