#pragma once

#include <memory>
#include <string>
#include <vector>

#include "acsf/coders.hpp"
#include "acsf/mlp.hpp"
#include "acsf/spiking_mlp.hpp"

namespace acsf {

enum class NetVariant { ann, spiking };
enum class CoderKind { none, rate, accumulate, adaptive };
enum class HeadKind { value, action };

std::string to_string(NetVariant v);
std::string to_string(CoderKind c);
NetVariant net_variant_from(const std::string& s);
CoderKind coder_kind_from(const std::string& s);

struct ApproxConfig {
  NetVariant variant = NetVariant::ann;
  CoderKind coder = CoderKind::none;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<std::size_t> hidden{64, 64};
  Activation activation = Activation::relu;
  HeadKind head = HeadKind::value;
  double max_action = 1.0;  // action-head scale
  std::size_t timesteps = 4;
  LifParams lif;
  FireMode fire_mode = FireMode::binary;
  /// Fixed per-dimension input scaling applied before the network (empty
  /// for identity). Brings observations into the encoder's sensitive range;
  /// applied to every variant so architectures stay matched.
  std::vector<double> input_scale;

  void validate() const;
};

/// Function approximator behind every network in the learning algorithms.
/// The ANN and spiking variants expose identical (batch, in) -> (batch, out)
/// shapes, so algorithm code never branches on the variant.
class Approx {
 public:
  virtual ~Approx() = default;

  virtual Tensor forward(const Tensor& x) = 0;
  virtual std::vector<Tensor> parameters() = 0;
  /// The subset of parameters() holding temporal coder weights (empty for
  /// coder-free networks); optimizers may give these their own step size.
  virtual std::vector<Tensor> coder_parameters() { return {}; }
  virtual std::unique_ptr<Approx> clone(bool trainable) const = 0;
  virtual const ApproxConfig& config() const = 0;

  /// Spike instrumentation; no-op for conventional networks.
  virtual void set_recorder(SpikeRecorder*) {}
  virtual void set_fire_mode(FireMode) {}
};

std::unique_ptr<Approx> make_approx(const ApproxConfig& config, Rng& init_rng);

/// theta_target <- tau * theta_source + (1 - tau) * theta_target, elementwise
/// over matching parameter lists. tau = 1 makes the target an exact copy.
void soft_update(std::vector<Tensor> target, std::vector<Tensor> source,
                 double tau);

}  // namespace acsf
