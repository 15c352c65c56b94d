#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace acsf {

enum class ActionKind { discrete, continuous };

struct EnvSpec {
  std::string id;
  std::size_t state_dim = 0;
  /// Number of actions (discrete) or action vector dimension (continuous).
  std::size_t action_dim = 0;
  ActionKind kind = ActionKind::discrete;
  double max_action = 0.0;  // continuous only
  std::size_t max_episode_steps = 0;
  /// Typical per-dimension observation magnitude, for input normalization.
  std::vector<double> obs_range;
};

struct StepResult {
  std::vector<double> state;
  double reward = 0.0;
  bool done = false;
};

/// Deterministic episodic environment: (seed, action sequence) fully
/// determines the trajectory. Stepping a finished episode is a contract
/// violation.
class Env {
 public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step_discrete(std::size_t action);
  virtual StepResult step_continuous(const std::vector<double>& action);
};

/// Known ids: "cartpole", "pendulum".
std::unique_ptr<Env> make_env(const std::string& id);

}  // namespace acsf
