#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "acsf/env.hpp"
#include "acsf/replay.hpp"
#include "acsf/rng.hpp"

namespace acsf {

using PolicyHash = std::array<std::uint8_t, 32>;

/// Little-endian binary transition file:
///   magic "ACSF" | version u32 | env-id (u32 length + bytes) | D_s u32 |
///   D_a u32 | count u64 | seed u64 | policy hash (32 bytes)
/// followed by `count` records of
///   s (D_s f64) | a (D_a f64, or u32 index for discrete envs) | r f64 |
///   s' (D_s f64) | done u8.
struct DatasetHeader {
  std::string env_id;
  std::uint32_t state_dim = 0;
  std::uint32_t action_dim = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  PolicyHash policy_hash{};
};

struct Dataset {
  DatasetHeader header;
  std::vector<Transition> transitions;
};

inline constexpr std::uint32_t kDatasetVersion = 1;

void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

/// Behavior policies receive the state and an exploration stream.
using DiscretePolicy =
    std::function<std::size_t(const std::vector<double>&, Rng&)>;
using ContinuousPolicy =
    std::function<std::vector<double>(const std::vector<double>&, Rng&)>;

struct CollectStats {
  std::size_t episodes = 0;
  double mean_episode_return = 0.0;
};

/// Roll the behavior policy until n transitions are gathered (episodes are
/// truncated at the requested size). Episode seeds derive from `seed`.
Dataset collect_dataset(Env& env, const ContinuousPolicy& policy,
                        std::size_t n_transitions, std::uint64_t seed,
                        const PolicyHash& policy_hash, CollectStats* stats);
Dataset collect_dataset_discrete(Env& env, const DiscretePolicy& policy,
                                 std::size_t n_transitions, std::uint64_t seed,
                                 const PolicyHash& policy_hash,
                                 CollectStats* stats);

/// SHA-256 of a file's bytes (dataset provenance metadata).
PolicyHash hash_file(const std::filesystem::path& path);

/// Load a dataset file into a replay buffer sized to its contents.
ReplayBuffer dataset_to_buffer(const Dataset& data);

}  // namespace acsf
