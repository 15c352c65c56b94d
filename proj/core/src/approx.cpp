#include "acsf/approx.hpp"

#include <stdexcept>

namespace acsf {

std::string to_string(NetVariant v) {
  return v == NetVariant::ann ? "ann" : "spiking";
}

std::string to_string(CoderKind c) {
  switch (c) {
    case CoderKind::none: return "none";
    case CoderKind::rate: return "rate";
    case CoderKind::accumulate: return "accumulate";
    case CoderKind::adaptive: return "adaptive";
  }
  return "?";
}

NetVariant net_variant_from(const std::string& s) {
  if (s == "ann") return NetVariant::ann;
  if (s == "spiking") return NetVariant::spiking;
  throw std::invalid_argument("unknown network variant: " + s);
}

CoderKind coder_kind_from(const std::string& s) {
  if (s == "none") return CoderKind::none;
  if (s == "rate") return CoderKind::rate;
  if (s == "accumulate") return CoderKind::accumulate;
  if (s == "adaptive") return CoderKind::adaptive;
  throw std::invalid_argument("unknown coder kind: " + s);
}

void ApproxConfig::validate() const {
  if (input_dim == 0 || output_dim == 0)
    throw std::invalid_argument("approx: zero input or output dimension");
  if (hidden.empty())
    throw std::invalid_argument("approx: at least one hidden layer required");
  if (variant == NetVariant::spiking && coder == CoderKind::none)
    throw std::invalid_argument("approx: spiking networks require a coder");
  if (variant == NetVariant::ann && coder != CoderKind::none &&
      coder != CoderKind::adaptive)
    throw std::invalid_argument(
        "approx: conventional networks support coder none or adaptive only");
  if (timesteps == 0) throw std::invalid_argument("approx: timesteps 0");
  if (!input_scale.empty() && input_scale.size() != input_dim)
    throw std::invalid_argument("approx: input_scale length " +
                                std::to_string(input_scale.size()) +
                                " does not match input_dim " +
                                std::to_string(input_dim));
  lif.validate();
}

namespace {

Tensor apply_input_scale(const Tensor& x, const ApproxConfig& cfg) {
  if (cfg.input_scale.empty()) return x;
  return mul_row(x, Tensor::from(Shape{cfg.input_scale.size()},
                                 std::vector<double>(cfg.input_scale)));
}

// Plain MLP, optionally with a tanh-scaled action head.
class AnnApprox final : public Approx {
 public:
  AnnApprox(ApproxConfig config, Rng& rng)
      : config_(std::move(config)),
        mlp_(MlpConfig{config_.input_dim, config_.hidden, config_.output_dim,
                       config_.activation},
             rng) {}

  Tensor forward(const Tensor& x) override {
    Tensor out = mlp_.forward(apply_input_scale(x, config_));
    if (config_.head == HeadKind::action)
      out = scale(tanh(out), config_.max_action);
    return out;
  }

  std::vector<Tensor> parameters() override { return mlp_.parameters(); }

  std::unique_ptr<Approx> clone(bool trainable) const override {
    return std::unique_ptr<Approx>(
        new AnnApprox(config_, mlp_.clone(trainable)));
  }

  const ApproxConfig& config() const override { return config_; }

 private:
  AnnApprox(ApproxConfig config, Mlp mlp)
      : config_(std::move(config)), mlp_(std::move(mlp)) {}
  ApproxConfig config_;
  Mlp mlp_;
};

// ANN with the coder structure attached: the state is expanded over the time
// window by w_e, the shared MLP runs once per step, and the per-step outputs
// are compressed by w_d. Keeps the architecture comparable to the spiking
// variant without any spiking dynamics.
class AnnCoderApprox final : public Approx {
 public:
  AnnCoderApprox(ApproxConfig config, Rng& rng)
      : config_(std::move(config)),
        mlp_(MlpConfig{config_.input_dim, config_.hidden, config_.output_dim,
                       config_.activation},
             rng),
        w_e_(Tensor::full(Shape{config_.timesteps}, 1.0, true)),
        w_d_(Tensor::full(Shape{config_.timesteps},
                          1.0 / double(config_.timesteps), true)) {}

  Tensor forward(const Tensor& x) override {
    Tensor scaled = apply_input_scale(x, config_);
    Tensor out;
    for (std::size_t t = 0; t < config_.timesteps; ++t) {
      Tensor step =
          mul(mlp_.forward(mul(scaled, index(w_e_, t))), index(w_d_, t));
      out = t == 0 ? step : add(out, step);
    }
    if (config_.head == HeadKind::action)
      out = scale(tanh(out), config_.max_action);
    return out;
  }

  std::vector<Tensor> parameters() override {
    auto p = mlp_.parameters();
    p.push_back(w_e_);
    p.push_back(w_d_);
    return p;
  }

  std::vector<Tensor> coder_parameters() override { return {w_e_, w_d_}; }

  std::unique_ptr<Approx> clone(bool trainable) const override {
    return std::unique_ptr<Approx>(new AnnCoderApprox(
        config_, mlp_.clone(trainable), w_e_.clone(trainable),
        w_d_.clone(trainable)));
  }

  const ApproxConfig& config() const override { return config_; }

 private:
  AnnCoderApprox(ApproxConfig config, Mlp mlp, Tensor w_e, Tensor w_d)
      : config_(std::move(config)),
        mlp_(std::move(mlp)),
        w_e_(std::move(w_e)),
        w_d_(std::move(w_d)) {}
  ApproxConfig config_;
  Mlp mlp_;
  Tensor w_e_;
  Tensor w_d_;
};

// Encoder -> spiking MLP -> decoder. The coder kind picks between trainable
// adaptive weights, the frozen classical constructions, and the
// accumulate-voltage readout (silent output layer, V read at the last step).
class SpikingApprox final : public Approx {
 public:
  SpikingApprox(ApproxConfig config, Rng& rng) : config_(std::move(config)) {
    SpikingMlpConfig net;
    net.input_dim = config_.input_dim;
    net.widths = config_.hidden;
    net.widths.push_back(config_.output_dim);
    net.lif = config_.lif;
    net.timesteps = config_.timesteps;
    net.fire_mode = config_.fire_mode;
    net.accumulate_output = config_.coder == CoderKind::accumulate;
    net_ = std::make_unique<SpikingMlp>(net, rng);

    switch (config_.coder) {
      case CoderKind::adaptive: {
        auto [enc, dec] = init_adaptive(config_.timesteps, config_.lif);
        encoder_ = std::move(enc);
        decoder_ = std::move(dec);
        break;
      }
      case CoderKind::rate:
        encoder_ = make_repeat_encoder(config_.timesteps, config_.lif);
        decoder_ = make_rate_decoder(config_.timesteps);
        break;
      case CoderKind::accumulate:
        encoder_ = make_repeat_encoder(config_.timesteps, config_.lif);
        // No decoder weights: the readout is the silent layer's voltage.
        break;
      default:
        throw std::invalid_argument("spiking approx: coder required");
    }
    if (config_.head == HeadKind::action && decoder_.w_d.defined())
      decoder_.mode = DecoderMode::action;
  }

  Tensor forward(const Tensor& x) override {
    SpikeTrain encoded =
        encode(apply_input_scale(x, config_), encoder_, config_.fire_mode);
    if (recorder_) recorder_->clear();
    if (config_.coder == CoderKind::accumulate) {
      Tensor v = net_->forward_final_voltage(encoded);
      if (config_.head == HeadKind::action)
        v = scale(tanh(v), config_.max_action);
      return v;
    }
    SpikeTrain out = net_->forward_unroll(encoded);
    if (config_.head == HeadKind::action)
      return decode_action(out, decoder_, config_.max_action);
    return decode_value(out, decoder_);
  }

  std::vector<Tensor> parameters() override {
    // Structure-determined list: adaptive coder weights are parameters even
    // in frozen target clones, so source/target lists always align.
    std::vector<Tensor> p = net_->parameters();
    if (config_.coder == CoderKind::adaptive) {
      p.push_back(encoder_.w_e);
      p.push_back(decoder_.w_d);
    }
    return p;
  }

  std::vector<Tensor> coder_parameters() override {
    if (config_.coder != CoderKind::adaptive) return {};
    return {encoder_.w_e, decoder_.w_d};
  }

  std::unique_ptr<Approx> clone(bool trainable) const override {
    auto copy = std::unique_ptr<SpikingApprox>(new SpikingApprox(config_));
    copy->net_ = std::make_unique<SpikingMlp>(net_->clone(trainable));
    copy->encoder_.lif = encoder_.lif;
    copy->encoder_.w_e =
        encoder_.w_e.clone(trainable && encoder_.w_e.requires_grad());
    if (decoder_.w_d.defined())
      copy->decoder_.w_d =
          decoder_.w_d.clone(trainable && decoder_.w_d.requires_grad());
    copy->decoder_.mode = decoder_.mode;
    return copy;
  }

  const ApproxConfig& config() const override { return config_; }

  void set_recorder(SpikeRecorder* rec) override {
    recorder_ = rec;
    net_->set_recorder(rec);
  }

  void set_fire_mode(FireMode mode) override {
    config_.fire_mode = mode;
    net_->set_fire_mode(mode);
  }

 private:
  explicit SpikingApprox(ApproxConfig config) : config_(std::move(config)) {}
  ApproxConfig config_;
  std::unique_ptr<SpikingMlp> net_;
  EncoderWeights encoder_;
  DecoderWeights decoder_;
  SpikeRecorder* recorder_ = nullptr;
};

}  // namespace

std::unique_ptr<Approx> make_approx(const ApproxConfig& config, Rng& init_rng) {
  config.validate();
  if (config.variant == NetVariant::spiking)
    return std::make_unique<SpikingApprox>(config, init_rng);
  if (config.coder == CoderKind::adaptive)
    return std::make_unique<AnnCoderApprox>(config, init_rng);
  return std::make_unique<AnnApprox>(config, init_rng);
}

void soft_update(std::vector<Tensor> target, std::vector<Tensor> source,
                 double tau) {
  if (target.size() != source.size())
    throw std::logic_error("soft_update: parameter lists differ in length");
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i].shape() != source[i].shape())
      throw std::logic_error("soft_update: parameter shape mismatch at " +
                             std::to_string(i));
    auto t = target[i].mutable_values();
    auto s = source[i].values();
    for (std::size_t j = 0; j < t.size(); ++j)
      t[j] = tau * s[j] + (1.0 - tau) * t[j];
  }
}

}  // namespace acsf
