#include "acsf/mlp.hpp"

#include <stdexcept>

#include "acsf/spiking_mlp.hpp"

namespace acsf {

void MlpConfig::validate() const {
  if (input_dim == 0 || output_dim == 0)
    throw std::invalid_argument("mlp: zero input or output dimension");
  for (std::size_t w : hidden)
    if (w == 0) throw std::invalid_argument("mlp: zero-width hidden layer");
}

Mlp::Mlp(MlpConfig config, Rng& init_rng) : config_(std::move(config)) {
  config_.validate();
  std::size_t fan_in = config_.input_dim;
  auto push_layer = [&](std::size_t width) {
    weights_.push_back(init_linear_weight(fan_in, width, init_rng));
    const double bound = 1.0 / std::sqrt(double(fan_in));
    biases_.push_back(Tensor::from(
        Shape{width}, init_rng.uniform_vector(width, -bound, bound), true));
    fan_in = width;
  };
  for (std::size_t w : config_.hidden) push_layer(w);
  push_layer(config_.output_dim);
}

Tensor Mlp::forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = add_row(matmul(h, weights_[l]), biases_[l]);
    if (l + 1 < weights_.size())
      h = config_.activation == Activation::relu ? relu(h) : tanh(h);
  }
  return h;
}

std::vector<Tensor> Mlp::parameters() {
  std::vector<Tensor> p;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    p.push_back(weights_[l]);
    p.push_back(biases_[l]);
  }
  return p;
}

Mlp Mlp::clone(bool trainable) const {
  Mlp copy(config_);
  for (const Tensor& w : weights_) copy.weights_.push_back(w.clone(trainable));
  for (const Tensor& b : biases_) copy.biases_.push_back(b.clone(trainable));
  return copy;
}

}  // namespace acsf
