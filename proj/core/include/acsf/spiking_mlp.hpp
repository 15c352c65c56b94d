#pragma once

#include <cstddef>
#include <vector>

#include "acsf/lif.hpp"
#include "acsf/rng.hpp"
#include "acsf/tensor.hpp"

namespace acsf {

/// Binary spike train over the simulation window: one (batch, width) tensor
/// per timestep.
struct SpikeTrain {
  std::vector<Tensor> steps;

  std::size_t timesteps() const { return steps.size(); }
  std::size_t batch() const { return steps.empty() ? 0 : steps[0].rows(); }
  std::size_t width() const { return steps.empty() ? 0 : steps[0].cols(); }
  bool is_binary() const;
};

/// Observer for emitted spikes, fed by forward passes when attached.
/// Layer index 0 is the train entering the first weight matrix (the encoder
/// output); indices 1.. are the spiking layers in order.
class SpikeRecorder {
 public:
  void record(std::size_t layer, const SpikeTrain& train);
  void clear() { trains_.clear(); }
  const std::vector<SpikeTrain>& trains() const { return trains_; }

 private:
  std::vector<SpikeTrain> trains_;
};

struct SpikingMlpConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> widths;  // hidden widths followed by output width
  LifParams lif;
  std::size_t timesteps = 4;
  FireMode fire_mode = FireMode::binary;
  /// When set, the last layer integrates silently (no fire, no reset) and
  /// forward_final_voltage() reads its V at the last step.
  bool accumulate_output = false;

  void validate() const;
};

/// Fully connected spiking network: each layer is a bias-free linear map
/// followed by LIF dynamics, unrolled over the configured time window.
class SpikingMlp {
 public:
  SpikingMlp(SpikingMlpConfig config, Rng& init_rng);

  /// Propagate a temporal input through all layers, carrying membrane state
  /// across timesteps. State is freshly initialized at entry, so independent
  /// calls never leak state into each other.
  SpikeTrain forward_unroll(const SpikeTrain& temporal_input);

  /// Accumulate-output variant: all layers spike except the last, which
  /// integrates its input current; returns its voltage at the final step,
  /// shape (batch, width_last). Requires config.accumulate_output.
  Tensor forward_final_voltage(const SpikeTrain& temporal_input);

  /// Force all carried membrane voltages back to the reset value.
  void reset_state();

  std::vector<Tensor> parameters();
  const SpikingMlpConfig& config() const { return config_; }
  const std::vector<Tensor>& weights() const { return weights_; }
  std::vector<std::size_t> layer_widths() const;  // input_dim then widths

  void set_fire_mode(FireMode mode) { config_.fire_mode = mode; }
  void set_recorder(SpikeRecorder* rec) { recorder_ = rec; }

  SpikingMlp clone(bool trainable) const;

 private:
  explicit SpikingMlp(SpikingMlpConfig config) : config_(std::move(config)) {}
  void check_input(const SpikeTrain& in) const;

  SpikingMlpConfig config_;
  std::vector<Tensor> weights_;  // (fan_in, width) per layer
  std::vector<LifState> states_;
  SpikeRecorder* recorder_ = nullptr;
};

/// Uniform +-1/sqrt(fan_in) initialization used for all linear maps.
Tensor init_linear_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng,
                          bool requires_grad = true);

}  // namespace acsf
