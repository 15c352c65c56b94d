#pragma once

#include <cstddef>
#include <utility>

#include "acsf/lif.hpp"
#include "acsf/spiking_mlp.hpp"
#include "acsf/tensor.hpp"

namespace acsf {

/// Temporal spike encoder: a vector of T weights expands a state over the
/// time window (one scalar per timestep, shared across features), and a LIF
/// layer converts the expanded currents into binary spikes.
struct EncoderWeights {
  Tensor w_e;  // shape (T)
  LifParams lif;

  std::size_t timesteps() const { return w_e.numel(); }
};

enum class DecoderMode { value, action };

/// Temporal decoder: one weight per timestep, shared across output neurons,
/// compressing a spike train into a real-valued readout.
struct DecoderWeights {
  Tensor w_d;  // shape (T)
  DecoderMode mode = DecoderMode::value;

  std::size_t timesteps() const { return w_d.numel(); }
};

/// Expand `state` (batch, D) over the time window and spike-encode it.
/// Differentiable with respect to w_e through the surrogate gradient.
/// Rejects non-finite state values.
SpikeTrain encode(const Tensor& state, const EncoderWeights& enc,
                  FireMode mode = FireMode::binary);

/// Q[b, j] = sum_t w_d[t] * spikes[t][b, j]. Output is unbounded in the
/// weights, which is what lets spiking networks express value functions
/// outside the firing-rate range [0, 1].
Tensor decode_value(const SpikeTrain& spikes, const DecoderWeights& dec);

/// Temporal compression followed by tanh squashing scaled to the action
/// bound, so decoded actions always lie in [-max_action, max_action].
Tensor decode_action(const SpikeTrain& spikes, const DecoderWeights& dec,
                     double max_action);

/// Classical coder constructions, returned as frozen weight vectors.
EncoderWeights make_repeat_encoder(std::size_t timesteps,
                                   const LifParams& lif = {});
DecoderWeights make_rate_decoder(std::size_t timesteps);
DecoderWeights make_accumulate_decoder(std::size_t timesteps, double beta);

/// Trainable coder pair initialized at a valid classical configuration:
/// encoder at the repeat construction, decoder at the rate construction.
std::pair<EncoderWeights, DecoderWeights> init_adaptive(
    std::size_t timesteps, const LifParams& lif = {});

}  // namespace acsf
