#include "acsf/spiking_mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace acsf {

bool SpikeTrain::is_binary() const {
  for (const Tensor& s : steps)
    for (double x : s.values())
      if (x != 0.0 && x != 1.0) return false;
  return true;
}

void SpikeRecorder::record(std::size_t layer, const SpikeTrain& train) {
  if (trains_.size() <= layer) trains_.resize(layer + 1);
  trains_[layer] = train;
}

void SpikingMlpConfig::validate() const {
  if (input_dim == 0) throw std::invalid_argument("spiking mlp: input_dim 0");
  if (widths.size() < 2)
    throw std::invalid_argument(
        "spiking mlp: needs at least one hidden layer plus the output layer");
  for (std::size_t w : widths)
    if (w == 0) throw std::invalid_argument("spiking mlp: zero-width layer");
  if (timesteps == 0) throw std::invalid_argument("spiking mlp: timesteps 0");
  lif.validate();
}

Tensor init_linear_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng,
                          bool requires_grad) {
  const double bound = 1.0 / std::sqrt(double(fan_in));
  return Tensor::from(Shape{fan_in, fan_out},
                      rng.uniform_vector(fan_in * fan_out, -bound, bound),
                      requires_grad);
}

SpikingMlp::SpikingMlp(SpikingMlpConfig config, Rng& init_rng)
    : config_(std::move(config)) {
  config_.validate();
  std::size_t fan_in = config_.input_dim;
  for (std::size_t w : config_.widths) {
    weights_.push_back(init_linear_weight(fan_in, w, init_rng));
    fan_in = w;
  }
}

void SpikingMlp::check_input(const SpikeTrain& in) const {
  if (in.timesteps() != config_.timesteps)
    throw std::invalid_argument(
        "spiking mlp: input has " + std::to_string(in.timesteps()) +
        " timesteps, configured for " + std::to_string(config_.timesteps));
  if (in.width() != config_.input_dim)
    throw std::invalid_argument("spiking mlp: input width " +
                                std::to_string(in.width()) + ", expected " +
                                std::to_string(config_.input_dim));
}

SpikeTrain SpikingMlp::forward_unroll(const SpikeTrain& temporal_input) {
  check_input(temporal_input);
  if (config_.accumulate_output)
    throw std::logic_error(
        "spiking mlp: configured with accumulate_output; use "
        "forward_final_voltage");
  const std::size_t batch = temporal_input.batch();
  const std::size_t layers = weights_.size();

  states_.clear();
  for (std::size_t l = 0; l < layers; ++l)
    states_.push_back(lif_initial_state(batch, config_.widths[l], config_.lif));

  std::vector<SpikeTrain> outputs(layers);
  for (std::size_t t = 0; t < config_.timesteps; ++t) {
    Tensor x = temporal_input.steps[t];
    for (std::size_t l = 0; l < layers; ++l) {
      Tensor current = matmul(x, weights_[l]);
      auto [spikes, next] =
          lif_step(current, states_[l], config_.lif, config_.fire_mode);
      states_[l] = next;
      outputs[l].steps.push_back(spikes);
      x = spikes;
    }
  }
  if (recorder_) {
    recorder_->record(0, temporal_input);
    for (std::size_t l = 0; l + 1 < layers; ++l)
      recorder_->record(l + 1, outputs[l]);
    // The final layer's spikes feed the decoder, not another weight matrix;
    // record them too so rate statistics cover every layer.
    recorder_->record(layers, outputs[layers - 1]);
  }
  return outputs[layers - 1];
}

Tensor SpikingMlp::forward_final_voltage(const SpikeTrain& temporal_input) {
  check_input(temporal_input);
  if (!config_.accumulate_output)
    throw std::logic_error("spiking mlp: accumulate_output not configured");
  const std::size_t batch = temporal_input.batch();
  const std::size_t layers = weights_.size();

  states_.clear();
  for (std::size_t l = 0; l < layers; ++l)
    states_.push_back(lif_initial_state(batch, config_.widths[l], config_.lif));

  std::vector<SpikeTrain> outputs(layers);
  Tensor out_v;
  for (std::size_t t = 0; t < config_.timesteps; ++t) {
    Tensor x = temporal_input.steps[t];
    for (std::size_t l = 0; l + 1 < layers; ++l) {
      Tensor current = matmul(x, weights_[l]);
      auto [spikes, next] =
          lif_step(current, states_[l], config_.lif, config_.fire_mode);
      states_[l] = next;
      outputs[l].steps.push_back(spikes);
      x = spikes;
    }
    // Silent output layer: integrate only.
    Tensor current = matmul(x, weights_[layers - 1]);
    out_v = lif_integrate(current, states_[layers - 1].v, config_.lif.beta);
    states_[layers - 1].v = out_v;
  }
  if (recorder_) {
    recorder_->record(0, temporal_input);
    for (std::size_t l = 0; l + 1 < layers; ++l)
      recorder_->record(l + 1, outputs[l]);
  }
  return out_v;
}

void SpikingMlp::reset_state() {
  for (std::size_t l = 0; l < states_.size(); ++l) {
    const std::size_t batch = states_[l].h.rows();
    states_[l] = lif_initial_state(batch, config_.widths[l], config_.lif);
  }
}

std::vector<Tensor> SpikingMlp::parameters() { return weights_; }

std::vector<std::size_t> SpikingMlp::layer_widths() const {
  std::vector<std::size_t> w{config_.input_dim};
  w.insert(w.end(), config_.widths.begin(), config_.widths.end());
  return w;
}

SpikingMlp SpikingMlp::clone(bool trainable) const {
  SpikingMlp copy(config_);
  copy.weights_.reserve(weights_.size());
  for (const Tensor& w : weights_) copy.weights_.push_back(w.clone(trainable));
  return copy;
}

}  // namespace acsf
