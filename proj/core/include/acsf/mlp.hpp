#pragma once

#include <cstddef>
#include <vector>

#include "acsf/rng.hpp"
#include "acsf/tensor.hpp"

namespace acsf {

enum class Activation { relu, tanh };

struct MlpConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 0;
  Activation activation = Activation::relu;

  void validate() const;
};

/// Conventional fully connected network with biases; linear output head.
class Mlp {
 public:
  Mlp(MlpConfig config, Rng& init_rng);

  Tensor forward(const Tensor& x) const;
  std::vector<Tensor> parameters();
  const MlpConfig& config() const { return config_; }
  Mlp clone(bool trainable) const;

 private:
  explicit Mlp(MlpConfig config) : config_(std::move(config)) {}
  MlpConfig config_;
  std::vector<Tensor> weights_;
  std::vector<Tensor> biases_;
};

}  // namespace acsf
