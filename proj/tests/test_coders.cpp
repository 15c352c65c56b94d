#include <doctest.h>

#include <cmath>
#include <limits>

#include "acsf/coders.hpp"
#include "fd_check.hpp"

using namespace acsf;
using acsf::testing::fd_max_rel_err;

namespace {

// Independent per-element simulation of repeat encoding: feed the raw state
// as the input current at every step and run the reset dynamics.
std::vector<std::vector<double>> repeat_encode_oracle(
    const std::vector<double>& state, std::size_t timesteps,
    const LifParams& p) {
  std::vector<double> h(state.size(), p.v_reset);
  std::vector<std::vector<double>> train;
  for (std::size_t t = 0; t < timesteps; ++t) {
    std::vector<double> spikes(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
      const double v = p.beta * h[i] + state[i];
      const double o = v >= p.v_threshold ? 1.0 : 0.0;
      h[i] = v * (1.0 - o) + p.v_reset;
      spikes[i] = o;
    }
    train.push_back(std::move(spikes));
  }
  return train;
}

double rate_decode_oracle(const std::vector<double>& train) {
  double s = 0.0;
  for (double x : train) s += x;
  return s / double(train.size());
}

// Q = sum_j beta^j O_{n-j} over the train read backwards.
double accumulate_decode_oracle(const std::vector<double>& train,
                                double beta) {
  double q = 0.0;
  double w = 1.0;
  for (std::size_t j = 0; j < train.size(); ++j) {
    q += w * train[train.size() - 1 - j];
    w *= beta;
  }
  return q;
}

SpikeTrain train_from_column(const std::vector<double>& bits) {
  SpikeTrain t;
  for (double b : bits) t.steps.push_back(Tensor::from({1, 1}, {b}));
  return t;
}

}  // namespace

TEST_CASE("encode hand traces") {
  // constant drive above threshold spikes every step: V = 2 -> spike, H = 0,
  // then V = 0.5*0 + 2 again
  EncoderWeights enc = make_repeat_encoder(2);
  SpikeTrain out = encode(Tensor::from({1, 1}, {2.0}), enc);
  CHECK(out.steps[0].values()[0] == 1.0);
  CHECK(out.steps[1].values()[0] == 1.0);

  // zero state produces a silent train
  SpikeTrain silent = encode(Tensor::zeros({2, 3}), make_repeat_encoder(4));
  for (const Tensor& s : silent.steps)
    for (double x : s.values()) CHECK(x == 0.0);

  CHECK_THROWS_AS(
      encode(Tensor::from({1, 1}, {std::numeric_limits<double>::quiet_NaN()}),
             enc),
      std::invalid_argument);
  CHECK_THROWS_AS(
      encode(Tensor::from({1, 1}, {std::numeric_limits<double>::infinity()}),
             enc),
      std::invalid_argument);
}

TEST_CASE("decode hand traces") {
  DecoderWeights rate = make_rate_decoder(4);
  Tensor q = decode_value(train_from_column({1, 0, 1, 1}), rate);
  CHECK(q.item() == doctest::Approx(0.75).epsilon(1e-15));

  Tensor zero = decode_value(train_from_column({0, 0, 0, 0}), rate);
  CHECK(zero.item() == 0.0);

  DecoderWeights acc = make_accumulate_decoder(3, 0.5);
  CHECK(acc.w_d.values()[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(acc.w_d.values()[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(acc.w_d.values()[2] == doctest::Approx(1.0).epsilon(1e-15));
  Tensor qa = decode_value(train_from_column({1, 0, 1}), acc);
  CHECK(qa.item() == doctest::Approx(1.25).epsilon(1e-15));

  // T mismatch
  CHECK_THROWS_AS(decode_value(train_from_column({1, 0}), rate),
                  std::invalid_argument);
}

TEST_CASE("classical constructors") {
  EncoderWeights rep = make_repeat_encoder(4);
  for (double w : rep.w_e.values()) CHECK(w == 1.0);
  CHECK_FALSE(rep.w_e.requires_grad());
  CHECK(make_repeat_encoder(1).w_e.numel() == 1);

  DecoderWeights rate = make_rate_decoder(4);
  for (double w : rate.w_d.values())
    CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(rate.w_d.requires_grad());

  // beta = 1 reduces to an unnormalized spike count
  DecoderWeights acc1 = make_accumulate_decoder(4, 1.0);
  for (double w : acc1.w_d.values()) CHECK(w == 1.0);

  // rate decoding of a binary train is bounded in [0, 1]
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> bits(4);
    for (double& b : bits) b = rng.uniform() < 0.5;
    const double q = decode_value(train_from_column(bits), rate).item();
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
}

TEST_CASE("theorem: constructed coders match brute-force implementations") {
  Rng rng(2024);
  LifParams p;
  for (std::size_t timesteps : {1ul, 2ul, 4ul, 8ul}) {
    EncoderWeights enc = make_repeat_encoder(timesteps, p);
    DecoderWeights rate = make_rate_decoder(timesteps);
    DecoderWeights acc = make_accumulate_decoder(timesteps, p.beta);
    for (int trial = 0; trial < 200; ++trial) {
      // encoder equivalence on a random state
      std::vector<double> state = rng.uniform_vector(3, -2.5, 2.5);
      SpikeTrain train =
          encode(Tensor::from({1, 3}, std::vector<double>(state)), enc);
      auto oracle = repeat_encode_oracle(state, timesteps, p);
      for (std::size_t t = 0; t < timesteps; ++t)
        for (std::size_t i = 0; i < 3; ++i)
          CHECK(std::abs(train.steps[t].values()[i] - oracle[t][i]) <= 1e-12);

      // decoder equivalences on a random binary train
      std::vector<double> bits(timesteps);
      for (double& b : bits) b = rng.uniform() < 0.5;
      SpikeTrain bt = train_from_column(bits);
      CHECK(std::abs(decode_value(bt, rate).item() -
                     rate_decode_oracle(bits)) <= 1e-12);
      CHECK(std::abs(decode_value(bt, acc).item() -
                     accumulate_decode_oracle(bits, p.beta)) <= 1e-12);
    }
  }
}

TEST_CASE("decode_value is linear in the spike input") {
  Rng rng(7);
  DecoderWeights dec{Tensor::from({4}, rng.uniform_vector(4, -1, 1)),
                     DecoderMode::value};
  for (int trial = 0; trial < 50; ++trial) {
    // real-relaxed trains
    SpikeTrain x, y, mix;
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    for (int t = 0; t < 4; ++t) {
      auto xv = rng.uniform_vector(6, -1, 1);
      auto yv = rng.uniform_vector(6, -1, 1);
      std::vector<double> mv(6);
      for (int i = 0; i < 6; ++i) mv[i] = a * xv[i] + b * yv[i];
      x.steps.push_back(Tensor::from({2, 3}, std::move(xv)));
      y.steps.push_back(Tensor::from({2, 3}, std::move(yv)));
      mix.steps.push_back(Tensor::from({2, 3}, std::move(mv)));
    }
    Tensor lhs = decode_value(mix, dec);
    Tensor rhs = add(scale(decode_value(x, dec), a),
                     scale(decode_value(y, dec), b));
    for (std::size_t i = 0; i < lhs.numel(); ++i)
      CHECK(lhs.values()[i] ==
            doctest::Approx(rhs.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("trainable decoding escapes the firing-rate range") {
  // a weight above 1 pushes the decoded value outside [0, 1]
  DecoderWeights dec{Tensor::from({4}, {0.5, 0.5, 0.5, 2.5}),
                     DecoderMode::value};
  Tensor q = decode_value(train_from_column({1, 1, 1, 1}), dec);
  CHECK(q.item() == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(q.item() > 1.0);
}

TEST_CASE("action decoding respects bounds") {
  DecoderWeights dec = make_rate_decoder(4);
  dec.mode = DecoderMode::action;
  Tensor zero = decode_action(train_from_column({0, 0, 0, 0}), dec, 2.0);
  CHECK(zero.item() == 0.0);

  Tensor full = decode_action(train_from_column({1, 1, 1, 1}), dec, 2.0);
  CHECK(full.item() == doctest::Approx(2.0 * std::tanh(1.0)).epsilon(1e-12));

  Rng rng(9);
  DecoderWeights wild{Tensor::from({4}, rng.uniform_vector(4, -9, 9)),
                      DecoderMode::action};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> bits(4);
    for (double& b : bits) b = rng.uniform() < 0.5;
    const double a = decode_action(train_from_column(bits), wild, 2.0).item();
    CHECK(a <= 2.0);
    CHECK(a >= -2.0);
  }
}

TEST_CASE("adaptive initialization starts at the classical coders") {
  auto [enc, dec] = init_adaptive(4);
  CHECK(enc.w_e.requires_grad());
  CHECK(dec.w_d.requires_grad());

  Rng rng(31);
  Tensor state = Tensor::from({2, 3}, rng.uniform_vector(6, -2, 2));
  SpikeTrain a = encode(state, enc);
  SpikeTrain b = encode(state, make_repeat_encoder(4));
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(a.steps[t].values()[i] == b.steps[t].values()[i]);

  DecoderWeights rate = make_rate_decoder(4);
  Tensor qa = decode_value(a, dec);
  Tensor qb = decode_value(b, rate);
  for (std::size_t i = 0; i < qa.numel(); ++i)
    CHECK(qa.values()[i] == qb.values()[i]);
}

TEST_CASE("gradients reach both coder weight vectors") {
  Rng rng(37);
  auto [enc, dec] = init_adaptive(4);
  Tensor state = Tensor::from({2, 3}, rng.uniform_vector(6, -2, 2));
  Tensor target = Tensor::from({2, 3}, rng.uniform_vector(6, 0, 1));

  SpikeTrain train = encode(state, enc, FireMode::smooth);
  Tensor out = decode_value(train, dec);
  backward(mean(square(sub(out, target))));

  bool enc_nonzero = false, dec_nonzero = false;
  for (double g : enc.w_e.grad()) enc_nonzero = enc_nonzero || g != 0.0;
  for (double g : dec.w_d.grad()) dec_nonzero = dec_nonzero || g != 0.0;
  CHECK(enc_nonzero);
  CHECK(dec_nonzero);
}
