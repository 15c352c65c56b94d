#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acsf/spiking_mlp.hpp"

namespace acsf {

struct LayerSynOps {
  std::size_t layer = 0;      // 0 = train entering the first weight matrix
  std::uint64_t spikes = 0;   // emitted spikes over the whole window
  std::uint64_t fan_out = 0;  // outgoing synapses per neuron (0 for the head)
  std::uint64_t synops = 0;   // spikes * fan_out
  double mean_rate = 0.0;     // spikes / (T * width * batch)
};

/// Synaptic operation counts for one forward pass (batch counted separately
/// so callers can normalize to per-inference figures).
/// Spiking convention: every emitted spike costs one operation per outgoing
/// synapse. Conventional convention: every neuron pays its full fan-in once
/// per inference regardless of input.
struct SynOpsReport {
  std::string variant;  // "ann" or "spiking"
  std::size_t timesteps = 0;
  std::size_t batch = 1;
  std::vector<LayerSynOps> layers;
  std::uint64_t total = 0;      // sum of per-layer synops
  std::uint64_t coder_ops = 0;  // dense encoder/decoder multiplies, separate
};

/// Count spike-driven operations from recorded trains. `layer_widths` is the
/// width sequence [input_dim, w_1, ..., w_L]; recording i feeds weight
/// matrix i and has fan-out layer_widths[i+1]. A final recording beyond the
/// last weight matrix (the decoder-facing train) contributes rate statistics
/// only.
SynOpsReport synops_snn(const std::vector<SpikeTrain>& recordings,
                        const std::vector<std::size_t>& layer_widths,
                        std::size_t timesteps);

/// Static count for the matched conventional network:
/// sum over layers of fan_in * neurons.
SynOpsReport synops_ann(const std::vector<std::size_t>& layer_widths);

/// Dense multiplies spent in the temporal coders per inference: T * D_in for
/// the encoder expansion plus T * D_out for the decoder compression (when a
/// decoder weight vector exists).
std::uint64_t coder_dense_ops(std::size_t timesteps, std::size_t input_dim,
                              std::size_t output_dim, bool has_decoder);

}  // namespace acsf
