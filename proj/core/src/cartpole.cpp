#include <cmath>
#include <stdexcept>

#include "acsf/env.hpp"
#include "acsf/rng.hpp"

namespace acsf {

StepResult Env::step_discrete(std::size_t) {
  throw std::logic_error("env: discrete step on a continuous environment");
}

StepResult Env::step_continuous(const std::vector<double>&) {
  throw std::logic_error("env: continuous step on a discrete environment");
}

namespace {

// Pole balancing with Euler integration; +1 reward per step, episode ends
// when the pole passes 12 degrees, the cart leaves +-2.4, or 500 steps pass.
class CartPole final : public Env {
 public:
  CartPole() {
    spec_.id = "cartpole";
    spec_.state_dim = 4;
    spec_.action_dim = 2;
    spec_.kind = ActionKind::discrete;
    spec_.max_episode_steps = 500;
    spec_.obs_range = {2.4, 3.0, kThetaLimit, 3.0};
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(mix_seed(seed));
    x_ = rng.uniform(-0.05, 0.05);
    x_dot_ = rng.uniform(-0.05, 0.05);
    theta_ = rng.uniform(-0.05, 0.05);
    theta_dot_ = rng.uniform(-0.05, 0.05);
    steps_ = 0;
    done_ = false;
    return state();
  }

  StepResult step_discrete(std::size_t action) override {
    if (done_) throw std::logic_error("cartpole: step after episode end");
    if (action > 1)
      throw std::invalid_argument("cartpole: action must be 0 or 1");

    const double force = action == 1 ? kForceMag : -kForceMag;
    const double cos_t = std::cos(theta_);
    const double sin_t = std::sin(theta_);
    const double temp =
        (force + kPoleMassLength * theta_dot_ * theta_dot_ * sin_t) /
        kTotalMass;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kLength * (4.0 / 3.0 - kMassPole * cos_t * cos_t / kTotalMass));
    const double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    x_ += kTau * x_dot_;
    x_dot_ += kTau * x_acc;
    theta_ += kTau * theta_dot_;
    theta_dot_ += kTau * theta_acc;
    ++steps_;

    const bool fell = std::abs(x_) > kXLimit || std::abs(theta_) > kThetaLimit;
    done_ = fell || steps_ >= spec_.max_episode_steps;
    return {state(), 1.0, done_};
  }

 private:
  std::vector<double> state() const { return {x_, x_dot_, theta_, theta_dot_}; }

  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kTotalMass = kMassCart + kMassPole;
  static constexpr double kLength = 0.5;  // half pole length
  static constexpr double kPoleMassLength = kMassPole * kLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXLimit = 2.4;
  static constexpr double kThetaLimit = 12.0 * 3.14159265358979323846 / 180.0;

  EnvSpec spec_;
  double x_ = 0, x_dot_ = 0, theta_ = 0, theta_dot_ = 0;
  std::size_t steps_ = 0;
  bool done_ = true;
};

}  // namespace

std::unique_ptr<Env> make_cartpole() { return std::make_unique<CartPole>(); }

}  // namespace acsf
