#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acsf/bc.hpp"
#include "acsf/bcq.hpp"
#include "acsf/checkpoint.hpp"
#include "acsf/dataset.hpp"
#include "acsf/ddpg.hpp"
#include "acsf/dqn.hpp"
#include "acsf/results.hpp"
#include "acsf/run_config.hpp"

namespace acsf {

/// The four learners behind one façade; exactly one member is set, matching
/// config.algorithm.
struct AgentBundle {
  std::string algorithm;
  std::unique_ptr<DqnAgent> dqn;
  std::unique_ptr<DdpgAgent> ddpg;
  std::unique_ptr<BcqAgent> bcq;
  std::unique_ptr<BcAgent> bc;

  /// Live (non-target) networks in a stable order, for checkpointing.
  std::map<std::string, std::vector<Tensor>> network_tensors();
  void load_network_tensors(
      const std::map<std::string, std::vector<Tensor>>& tensors);
};

AgentBundle build_agent(const RunConfig& cfg, std::uint64_t seed);
AgentBundle agent_from_checkpoint(const Checkpoint& ckpt);

/// Ten-round evaluation protocol: epsilon-greedy (default 0.05) for discrete
/// tasks, the deterministic policy (no exploration noise) for continuous
/// ones. Episode seeds derive from (seed, step).
EvalRecord evaluate_policy(const RunConfig& cfg, AgentBundle& agent,
                           std::size_t step, std::uint64_t seed,
                           double wall_clock_s);

struct TrainOutcome {
  std::filesystem::path run_dir;
  std::vector<std::vector<EvalRecord>> per_seed;
  std::vector<std::filesystem::path> best_checkpoints;
  std::vector<std::filesystem::path> final_checkpoints;
};

/// Train every seed (bounded worker pool), persisting the resolved config,
/// per-seed eval CSVs, the aggregate CSV, the learning-curve SVG, and
/// best/final checkpoints under out_dir.
TrainOutcome run_training(const RunConfig& cfg,
                          const std::filesystem::path& out_dir);

struct AblationOutcome {
  std::filesystem::path dir;
  std::vector<AblationRow> rows;
};

/// The five-row coder/network grid at matched budgets and seeds.
AblationOutcome run_ablation(const RunConfig& base,
                             const std::filesystem::path& out_dir);

struct CollectOutcome {
  std::filesystem::path file;
  CollectStats stats;
  std::uint64_t count = 0;
};

/// Roll a behavior policy (a trained checkpoint, or "random") and persist
/// the dataset. `noise` is exploration mixed into the policy: action noise
/// as a fraction of max_action for continuous tasks, epsilon for discrete
/// ones.
CollectOutcome run_collect(const std::string& env_id,
                           const std::string& checkpoint_path,
                           std::size_t size, double noise, std::uint64_t seed,
                           const std::filesystem::path& out_file);

/// Spike-recorded evaluation episodes; emits per-network SynOps alongside
/// the matched conventional static counts.
std::vector<PowerSection> run_power(const Checkpoint& ckpt,
                                    std::size_t episodes,
                                    const std::filesystem::path& out_json);

}  // namespace acsf
