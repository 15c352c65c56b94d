#pragma once

#include <utility>

#include "acsf/tensor.hpp"

namespace acsf {

/// Discrete LIF neuron parameters.
struct LifParams {
  double beta = 0.5;         // membrane decay factor, in (0, 1]
  double v_threshold = 1.0;  // firing threshold
  double v_reset = 0.0;      // reset voltage
  double alpha = 2.0;        // surrogate gradient width

  void validate() const;
};

/// Per-neuron membrane state carried across the temporal unroll.
/// `h` is the post-reset voltage H_t; `v` the pre-reset voltage V_t,
/// retained so accumulate-style readouts can inspect it.
struct LifState {
  Tensor h;
  Tensor v;
};

/// Fresh state at the reset voltage, shape (batch, width).
LifState lif_initial_state(std::size_t batch, std::size_t width,
                           const LifParams& params);

/// One step of the discrete LIF dynamics:
///   V_t = beta * H_{t-1} + I_t
///   O_t = g(V_t)                      (spike_fire, surrogate backward)
///   H_t = V_t * (1 - O_t) + V_reset
/// Returns the spikes O_t and the updated state.
std::pair<Tensor, LifState> lif_step(const Tensor& input_current,
                                     const LifState& state,
                                     const LifParams& params,
                                     FireMode mode = FireMode::binary);

/// Integrate-only variant: V_t = beta * V_{t-1} + I_t with no firing and no
/// reset. Used by the accumulate-voltage readout, which reads V at the final
/// step of a silent output layer.
Tensor lif_integrate(const Tensor& input_current, const Tensor& prev_v,
                     double beta);

/// Double-exponential post-synaptic potential kernel of the continuous
/// model, K(dt) = v0 * (exp(-dt / tau_m) - exp(-dt / tau_s)). Reference
/// utility only; the discrete dynamics above are what training uses.
double psp_kernel(double dt, double tau_m, double tau_s, double v0);

}  // namespace acsf
