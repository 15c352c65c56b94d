#include "acsf/coders.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace acsf {

SpikeTrain encode(const Tensor& state, const EncoderWeights& enc,
                  FireMode mode) {
  for (double x : state.values())
    if (!std::isfinite(x))
      throw std::invalid_argument("encode: non-finite state value");
  const std::size_t steps = enc.timesteps();
  if (steps == 0) throw std::invalid_argument("encode: empty encoder");
  const std::size_t batch = state.rows();
  const std::size_t dim = state.cols();

  SpikeTrain train;
  train.steps.reserve(steps);
  LifState st = lif_initial_state(batch, dim, enc.lif);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor expanded = mul(state, index(enc.w_e, t));
    auto [spikes, next] = lif_step(expanded, st, enc.lif, mode);
    st = next;
    train.steps.push_back(spikes);
  }
  return train;
}

Tensor decode_value(const SpikeTrain& spikes, const DecoderWeights& dec) {
  if (spikes.timesteps() != dec.timesteps())
    throw std::invalid_argument(
        "decode: train has " + std::to_string(spikes.timesteps()) +
        " timesteps, decoder has " + std::to_string(dec.timesteps()));
  Tensor out = mul(spikes.steps[0], index(dec.w_d, 0));
  for (std::size_t t = 1; t < spikes.timesteps(); ++t)
    out = add(out, mul(spikes.steps[t], index(dec.w_d, t)));
  return out;
}

Tensor decode_action(const SpikeTrain& spikes, const DecoderWeights& dec,
                     double max_action) {
  return scale(tanh(decode_value(spikes, dec)), max_action);
}

EncoderWeights make_repeat_encoder(std::size_t timesteps,
                                   const LifParams& lif) {
  if (timesteps == 0) throw std::invalid_argument("repeat encoder: T = 0");
  return EncoderWeights{Tensor::full(Shape{timesteps}, 1.0), lif};
}

DecoderWeights make_rate_decoder(std::size_t timesteps) {
  if (timesteps == 0) throw std::invalid_argument("rate decoder: T = 0");
  return DecoderWeights{
      Tensor::full(Shape{timesteps}, 1.0 / double(timesteps)),
      DecoderMode::value};
}

DecoderWeights make_accumulate_decoder(std::size_t timesteps, double beta) {
  if (timesteps == 0) throw std::invalid_argument("accumulate decoder: T = 0");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::domain_error("accumulate decoder: beta must be in (0, 1]");
  // Weight beta^j on the j-th step counted back from the end.
  std::vector<double> w(timesteps);
  for (std::size_t t = 0; t < timesteps; ++t)
    w[t] = std::pow(beta, double(timesteps - 1 - t));
  return DecoderWeights{Tensor::from(Shape{timesteps}, std::move(w)),
                        DecoderMode::value};
}

std::pair<EncoderWeights, DecoderWeights> init_adaptive(std::size_t timesteps,
                                                        const LifParams& lif) {
  EncoderWeights enc{Tensor::full(Shape{timesteps}, 1.0, true), lif};
  DecoderWeights dec{
      Tensor::full(Shape{timesteps}, 1.0 / double(timesteps), true),
      DecoderMode::value};
  return {std::move(enc), std::move(dec)};
}

}  // namespace acsf
