#include "acsf/synops.hpp"

#include <stdexcept>

namespace acsf {

SynOpsReport synops_snn(const std::vector<SpikeTrain>& recordings,
                        const std::vector<std::size_t>& layer_widths,
                        std::size_t timesteps) {
  if (layer_widths.size() < 2)
    throw std::logic_error("synops: need at least input and output widths");
  const std::size_t weight_count = layer_widths.size() - 1;
  if (recordings.size() < weight_count)
    throw std::logic_error("synops: missing spike recordings (have " +
                           std::to_string(recordings.size()) + ", need " +
                           std::to_string(weight_count) + ")");

  SynOpsReport report;
  report.variant = "spiking";
  report.timesteps = timesteps;
  for (std::size_t i = 0; i < recordings.size(); ++i) {
    const SpikeTrain& train = recordings[i];
    if (!train.steps.empty() && train.timesteps() != timesteps)
      throw std::logic_error("synops: recording window mismatch");
    if (i < weight_count && train.width() != layer_widths[i])
      throw std::logic_error("synops: recording width mismatch at layer " +
                             std::to_string(i));

    LayerSynOps layer;
    layer.layer = i;
    layer.fan_out = i + 1 < layer_widths.size() ? layer_widths[i + 1] : 0;
    std::uint64_t spikes = 0;
    for (const Tensor& step : train.steps)
      for (double x : step.values())
        if (x != 0.0) ++spikes;
    layer.spikes = spikes;
    layer.synops = spikes * layer.fan_out;
    const double denom =
        double(timesteps) * double(train.width()) * double(train.batch());
    layer.mean_rate = denom > 0 ? double(spikes) / denom : 0.0;
    report.batch = train.batch() ? train.batch() : report.batch;
    report.total += layer.synops;
    report.layers.push_back(layer);
  }
  return report;
}

SynOpsReport synops_ann(const std::vector<std::size_t>& layer_widths) {
  if (layer_widths.size() < 2)
    throw std::logic_error("synops: need at least input and output widths");
  SynOpsReport report;
  report.variant = "ann";
  report.timesteps = 1;
  for (std::size_t l = 1; l < layer_widths.size(); ++l) {
    LayerSynOps layer;
    layer.layer = l - 1;
    layer.fan_out = layer_widths[l];
    layer.spikes = 0;
    layer.synops = std::uint64_t(layer_widths[l - 1]) * layer_widths[l];
    layer.mean_rate = 0.0;
    report.total += layer.synops;
    report.layers.push_back(layer);
  }
  return report;
}

std::uint64_t coder_dense_ops(std::size_t timesteps, std::size_t input_dim,
                              std::size_t output_dim, bool has_decoder) {
  std::uint64_t ops = std::uint64_t(timesteps) * input_dim;
  if (has_decoder) ops += std::uint64_t(timesteps) * output_dim;
  return ops;
}

}  // namespace acsf
