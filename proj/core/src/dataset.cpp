#include "acsf/dataset.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace acsf {

namespace {

constexpr char kMagic[4] = {'A', 'C', 'S', 'F'};

template <typename T>
void put(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("dataset: truncated file");
  return v;
}

void put_doubles(std::ostream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           std::streamsize(v.size() * sizeof(double)));
}

std::vector<double> get_doubles(std::istream& is, std::size_t n) {
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          std::streamsize(n * sizeof(double)));
  if (!is) throw std::runtime_error("dataset: truncated record");
  return v;
}

ActionKind env_action_kind(const std::string& env_id) {
  return make_env(env_id)->spec().kind;
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("dataset: cannot open " + path.string());

  const DatasetHeader& h = data.header;
  if (h.count != data.transitions.size())
    throw std::logic_error("dataset: header count does not match transitions");

  os.write(kMagic, 4);
  put<std::uint32_t>(os, kDatasetVersion);
  put<std::uint32_t>(os, std::uint32_t(h.env_id.size()));
  os.write(h.env_id.data(), std::streamsize(h.env_id.size()));
  put<std::uint32_t>(os, h.state_dim);
  put<std::uint32_t>(os, h.action_dim);
  put<std::uint64_t>(os, h.count);
  put<std::uint64_t>(os, h.seed);
  os.write(reinterpret_cast<const char*>(h.policy_hash.data()), 32);

  const bool discrete = env_action_kind(h.env_id) == ActionKind::discrete;
  for (const Transition& t : data.transitions) {
    if (t.state.size() != h.state_dim || t.next_state.size() != h.state_dim)
      throw std::logic_error("dataset: transition state dimension mismatch");
    put_doubles(os, t.state);
    if (discrete) {
      put<std::uint32_t>(os, t.action_index);
    } else {
      if (t.action.size() != h.action_dim)
        throw std::logic_error("dataset: transition action dimension mismatch");
      put_doubles(os, t.action);
    }
    put<double>(os, t.reward);
    put_doubles(os, t.next_state);
    put<std::uint8_t>(os, t.done ? 1 : 0);
  }
  if (!os) throw std::runtime_error("dataset: write failed: " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dataset: cannot open " + path.string());

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("dataset: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(is);
  if (version != kDatasetVersion)
    throw std::runtime_error("dataset: unsupported version " +
                             std::to_string(version));

  Dataset data;
  const auto id_len = get<std::uint32_t>(is);
  data.header.env_id.resize(id_len);
  is.read(data.header.env_id.data(), id_len);
  data.header.state_dim = get<std::uint32_t>(is);
  data.header.action_dim = get<std::uint32_t>(is);
  data.header.count = get<std::uint64_t>(is);
  data.header.seed = get<std::uint64_t>(is);
  is.read(reinterpret_cast<char*>(data.header.policy_hash.data()), 32);
  if (!is) throw std::runtime_error("dataset: truncated header");

  const bool discrete =
      env_action_kind(data.header.env_id) == ActionKind::discrete;
  data.transitions.resize(data.header.count);
  for (Transition& t : data.transitions) {
    t.state = get_doubles(is, data.header.state_dim);
    if (discrete) {
      t.action_index = get<std::uint32_t>(is);
    } else {
      t.action = get_doubles(is, data.header.action_dim);
    }
    t.reward = get<double>(is);
    t.next_state = get_doubles(is, data.header.state_dim);
    t.done = get<std::uint8_t>(is) != 0;
  }
  return data;
}

namespace {

template <typename StepFn>
Dataset collect_impl(Env& env, std::size_t n_transitions, std::uint64_t seed,
                     const PolicyHash& policy_hash, CollectStats* stats,
                     StepFn step_fn) {
  Dataset data;
  data.header.env_id = env.spec().id;
  data.header.state_dim = std::uint32_t(env.spec().state_dim);
  data.header.action_dim = std::uint32_t(env.spec().action_dim);
  data.header.seed = seed;
  data.header.policy_hash = policy_hash;

  Rng policy_rng(mix_seed(seed ^ 0x5eed5eedull));
  double return_sum = 0.0;
  std::size_t episodes = 0;
  std::uint64_t episode_seed = seed;
  std::vector<double> state;
  bool need_reset = true;
  double episode_return = 0.0;

  while (data.transitions.size() < n_transitions) {
    if (need_reset) {
      state = env.reset(mix_seed(episode_seed++));
      episode_return = 0.0;
      need_reset = false;
    }
    Transition t;
    t.state = state;
    StepResult r = step_fn(state, policy_rng, t);
    t.reward = r.reward;
    t.next_state = r.state;
    t.done = r.done;
    episode_return += r.reward;
    state = r.state;
    data.transitions.push_back(std::move(t));
    if (r.done) {
      return_sum += episode_return;
      ++episodes;
      need_reset = true;
    }
  }
  data.header.count = data.transitions.size();
  if (stats) {
    stats->episodes = episodes;
    stats->mean_episode_return =
        episodes ? return_sum / double(episodes) : 0.0;
  }
  return data;
}

}  // namespace

Dataset collect_dataset(Env& env, const ContinuousPolicy& policy,
                        std::size_t n_transitions, std::uint64_t seed,
                        const PolicyHash& policy_hash, CollectStats* stats) {
  if (env.spec().kind != ActionKind::continuous)
    throw std::logic_error("collect_dataset: continuous policy on a discrete "
                           "environment");
  return collect_impl(env, n_transitions, seed, policy_hash, stats,
                      [&](const std::vector<double>& s, Rng& rng,
                          Transition& t) {
                        t.action = policy(s, rng);
                        return env.step_continuous(t.action);
                      });
}

Dataset collect_dataset_discrete(Env& env, const DiscretePolicy& policy,
                                 std::size_t n_transitions, std::uint64_t seed,
                                 const PolicyHash& policy_hash,
                                 CollectStats* stats) {
  if (env.spec().kind != ActionKind::discrete)
    throw std::logic_error("collect_dataset: discrete policy on a continuous "
                           "environment");
  return collect_impl(env, n_transitions, seed, policy_hash, stats,
                      [&](const std::vector<double>& s, Rng& rng,
                          Transition& t) {
                        t.action_index = std::uint32_t(policy(s, rng));
                        return env.step_discrete(t.action_index);
                      });
}

PolicyHash hash_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("hash_file: cannot open " + path.string());

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("hash_file: EVP context");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (is) {
    is.read(buf, sizeof(buf));
    EVP_DigestUpdate(ctx, buf, std::size_t(is.gcount()));
  }
  PolicyHash out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, out.data(), &len);
  EVP_MD_CTX_free(ctx);
  return out;
}

ReplayBuffer dataset_to_buffer(const Dataset& data) {
  ReplayBuffer buf(std::max<std::size_t>(data.transitions.size(), 1));
  for (const Transition& t : data.transitions) buf.push(t);
  return buf;
}

}  // namespace acsf
