#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "acsf/lif.hpp"

namespace acsf {

/// Invalid configuration or command line (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Filesystem/serialization failures (exit code 2).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment configuration. Every field can be set from a key=value config
/// file and overridden by a command-line flag of the same name. Temporal and
/// learning defaults follow the reference settings (gamma 0.99, T = 4,
/// alpha = 2, threshold 1, reset 0, batch 32/100, tau 1/0.005); network
/// widths default to desk-scale sizes and are freely configurable.
struct RunConfig {
  std::string algorithm = "dqn";  // dqn | ddpg | bcq | bc
  std::string variant = "spiking";  // ann | spiking
  std::string coder = "adaptive";  // adaptive | rate | accumulate | none
  std::string env = "cartpole";
  std::string dataset;  // offline algorithms read transitions from here

  // Temporal coding.
  std::size_t timesteps = 4;
  double lif_beta = 0.5;
  double lif_threshold = 1.0;
  double lif_reset = 0.0;
  double surrogate_alpha = 2.0;

  // Networks.
  std::vector<std::size_t> hidden{64, 64};
  std::vector<std::size_t> vae_hidden{96, 96};
  std::size_t latent_dim = 0;  // 0 resolves to 2 * action_dim

  // Optimization.
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t target_copy_period = 1000;  // dqn hard target copies
  double learning_rate = 1e-4;
  double bc_learning_rate = 1e-3;
  std::size_t batch_size = 0;  // 0 resolves to 32 (dqn) / 100 (others)
  std::size_t buffer_capacity = 100000;

  // Batch-constrained learner.
  double lambda = 0.75;
  std::size_t n_samples = 10;
  double phi = 1.0;  // perturbation range, fraction of max_action

  // Exploration and warmup (online algorithms).
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::size_t eps_decay_steps = 10000;
  double eval_epsilon = 0.05;
  double exploration_noise = 0.1;  // fraction of max_action
  std::size_t warmup_steps = 1000;

  // Run protocol.
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::size_t total_steps = std::size_t(-1);  // auto: 100K online, 50K offline
  std::size_t eval_period = 1000;
  std::size_t eval_episodes = 10;
  std::size_t max_workers = 0;  // 0: min(#seeds, hardware threads)
  bool stop_at_target = false;
  double target_return = 0.0;

  bool offline() const { return algorithm == "bcq" || algorithm == "bc"; }
  LifParams lif() const {
    return LifParams{lif_beta, lif_threshold, lif_reset, surrogate_alpha};
  }

  /// Resolve auto fields and check invariants; throws UsageError with the
  /// offending field names.
  void resolve_and_validate();
};

/// Known configuration keys in serialization order.
const std::vector<std::string>& run_config_keys();

/// Set one field from its textual form; throws UsageError for unknown keys
/// or unparseable values.
void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value);

/// key = value lines; '#' starts a comment. Returns pairs in file order.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path);

/// Full textual form; parsing it back reproduces the config exactly.
std::string serialize_config(const RunConfig& cfg);
RunConfig config_from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> config_to_kv(
    const RunConfig& cfg);

}  // namespace acsf
