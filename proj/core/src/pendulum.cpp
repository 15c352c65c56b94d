#include <cmath>
#include <stdexcept>

#include "acsf/env.hpp"
#include "acsf/rng.hpp"

namespace acsf {

namespace {

constexpr double kPi = 3.14159265358979323846;

double angle_normalize(double x) {
  // Wrap to [-pi, pi).
  double y = std::fmod(x + kPi, 2.0 * kPi);
  if (y < 0) y += 2.0 * kPi;
  return y - kPi;
}

// Torque-limited swing-up. Observation (cos th, sin th, th_dot); reward
// -(th^2 + 0.1 th_dot^2 + 0.001 u^2), so 0 is the upright optimum and every
// reward is nonpositive. Angular velocity is clamped to +-8.
class Pendulum final : public Env {
 public:
  Pendulum() {
    spec_.id = "pendulum";
    spec_.state_dim = 3;
    spec_.action_dim = 1;
    spec_.kind = ActionKind::continuous;
    spec_.max_action = kMaxTorque;
    spec_.max_episode_steps = 200;
    spec_.obs_range = {1.0, 1.0, kMaxSpeed};
  }

  const EnvSpec& spec() const override { return spec_; }

  std::vector<double> reset(std::uint64_t seed) override {
    Rng rng(mix_seed(seed));
    theta_ = rng.uniform(-kPi, kPi);
    theta_dot_ = rng.uniform(-1.0, 1.0);
    steps_ = 0;
    done_ = false;
    return state();
  }

  StepResult step_continuous(const std::vector<double>& action) override {
    if (done_) throw std::logic_error("pendulum: step after episode end");
    if (action.size() != 1)
      throw std::invalid_argument("pendulum: action dimension must be 1");
    const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);

    const double th = angle_normalize(theta_);
    const double cost =
        th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

    theta_dot_ += (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                   3.0 / (kMass * kLength * kLength) * u) *
                  kDt;
    theta_dot_ = std::clamp(theta_dot_, -kMaxSpeed, kMaxSpeed);
    theta_ += theta_dot_ * kDt;
    ++steps_;

    done_ = steps_ >= spec_.max_episode_steps;
    return {state(), -cost, done_};
  }

 private:
  std::vector<double> state() const {
    return {std::cos(theta_), std::sin(theta_), theta_dot_};
  }

  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;

  EnvSpec spec_;
  double theta_ = 0, theta_dot_ = 0;
  std::size_t steps_ = 0;
  bool done_ = true;
};

}  // namespace

std::unique_ptr<Env> make_pendulum() { return std::make_unique<Pendulum>(); }

std::unique_ptr<Env> make_cartpole();

std::unique_ptr<Env> make_env(const std::string& id) {
  if (id == "cartpole") return make_cartpole();
  if (id == "pendulum") return make_pendulum();
  throw std::invalid_argument("unknown environment id: " + id);
}

}  // namespace acsf
