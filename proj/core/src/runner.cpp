#include "acsf/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "acsf/synops.hpp"

namespace acsf {

namespace {

// Stream tags for deriving independent per-seed RNG streams.
enum : std::uint64_t {
  kInitTag = 0x11,
  kExploreTag = 0x22,
  kBufferTag = 0x33,
  kEvalTag = 0x44,
  kEnvTag = 0x55,
  kDataTag = 0x66,
};

std::uint64_t derive(std::uint64_t seed, std::uint64_t tag,
                     std::uint64_t salt = 0) {
  return mix_seed(mix_seed(seed) ^ mix_seed(tag) ^ mix_seed(salt * 2 + 1));
}

ApproxConfig base_approx_config(const RunConfig& cfg, std::size_t in,
                                std::size_t out, HeadKind head,
                                double max_action, Activation activation) {
  ApproxConfig a;
  a.variant = net_variant_from(cfg.variant);
  a.coder = coder_kind_from(cfg.coder);
  a.input_dim = in;
  a.output_dim = out;
  a.hidden = cfg.hidden;
  a.activation = activation;
  a.head = head;
  a.max_action = max_action;
  a.timesteps = cfg.timesteps;
  a.lif = cfg.lif();
  a.fire_mode = FireMode::binary;
  return a;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

AgentBundle build_agent(const RunConfig& cfg, std::uint64_t seed) {
  const EnvSpec spec = make_env(cfg.env)->spec();
  Rng init(derive(seed, kInitTag));

  AgentBundle bundle;
  bundle.algorithm = cfg.algorithm;
  if (cfg.algorithm == "dqn") {
    auto qc = base_approx_config(cfg, spec.state_dim, spec.action_dim,
                                 HeadKind::value, 1.0, Activation::relu);
    DqnConfig dc;
    dc.gamma = cfg.gamma;
    dc.learning_rate = cfg.learning_rate;
    dc.batch_size = cfg.batch_size;
    dc.target_copy_period = cfg.target_copy_period;
    bundle.dqn = std::make_unique<DqnAgent>(make_approx(qc, init), dc);
  } else if (cfg.algorithm == "ddpg") {
    auto ac = base_approx_config(cfg, spec.state_dim, spec.action_dim,
                                 HeadKind::action, spec.max_action,
                                 Activation::relu);
    auto cc = base_approx_config(cfg, spec.state_dim + spec.action_dim, 1,
                                 HeadKind::value, 1.0, Activation::relu);
    DdpgConfig dc;
    dc.gamma = cfg.gamma;
    dc.tau = cfg.tau;
    dc.learning_rate = cfg.learning_rate;
    dc.batch_size = cfg.batch_size;
    dc.exploration_noise = cfg.exploration_noise;
    bundle.ddpg = std::make_unique<DdpgAgent>(make_approx(ac, init),
                                              make_approx(cc, init), dc);
  } else if (cfg.algorithm == "bcq") {
    auto cc = base_approx_config(cfg, spec.state_dim + spec.action_dim, 1,
                                 HeadKind::value, 1.0, Activation::relu);
    auto pc = base_approx_config(cfg, spec.state_dim + spec.action_dim,
                                 spec.action_dim, HeadKind::action,
                                 cfg.phi * spec.max_action, Activation::relu);
    VaeConfig vc;
    vc.state_dim = spec.state_dim;
    vc.action_dim = spec.action_dim;
    vc.latent_dim =
        cfg.latent_dim ? cfg.latent_dim : 2 * spec.action_dim;
    vc.hidden = cfg.vae_hidden;
    vc.max_action = spec.max_action;
    BcqConfig bc;
    bc.gamma = cfg.gamma;
    bc.tau = cfg.tau;
    bc.lambda = cfg.lambda;
    bc.n_samples = cfg.n_samples;
    bc.phi = cfg.phi;
    bc.max_action = spec.max_action;
    bc.learning_rate = cfg.learning_rate;
    bc.batch_size = cfg.batch_size;
    bundle.bcq = std::make_unique<BcqAgent>(
        VaeNetwork(vc, init), make_approx(cc, init), make_approx(cc, init),
        make_approx(pc, init), bc);
  } else if (cfg.algorithm == "bc") {
    // The conventional cloning network keeps a linear head (actions are
    // clipped at execution); the spiking one decodes through the bounded
    // action head.
    const bool spiking = cfg.variant == "spiking";
    auto pc = base_approx_config(
        cfg, spec.state_dim, spec.action_dim,
        spiking ? HeadKind::action : HeadKind::value, spec.max_action,
        Activation::tanh);
    BcConfig bcc;
    bcc.learning_rate = cfg.bc_learning_rate;
    bcc.batch_size = cfg.batch_size;
    bundle.bc = std::make_unique<BcAgent>(make_approx(pc, init), bcc);
  } else {
    throw UsageError("unknown algorithm: " + cfg.algorithm);
  }
  return bundle;
}

std::map<std::string, std::vector<Tensor>> AgentBundle::network_tensors() {
  std::map<std::string, std::vector<Tensor>> out;
  if (dqn) {
    out["q"] = dqn->q().parameters();
  } else if (ddpg) {
    out["actor"] = ddpg->actor().parameters();
    out["critic"] = ddpg->critic().parameters();
  } else if (bcq) {
    out["vae"] = bcq->vae().parameters();
    out["critic1"] = bcq->critic1().parameters();
    out["critic2"] = bcq->critic2().parameters();
    out["perturb"] = bcq->perturb().parameters();
  } else if (bc) {
    out["policy"] = bc->policy().parameters();
  }
  return out;
}

void AgentBundle::load_network_tensors(
    const std::map<std::string, std::vector<Tensor>>& tensors) {
  auto live = network_tensors();
  for (auto& [name, params] : live) {
    auto it = tensors.find(name);
    if (it == tensors.end())
      throw std::logic_error("checkpoint: missing network '" + name + "'");
    const auto& stored = it->second;
    if (stored.size() != params.size())
      throw std::logic_error("checkpoint: parameter count mismatch for '" +
                             name + "'");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (stored[i].shape() != params[i].shape())
        throw std::logic_error("checkpoint: shape mismatch in '" + name +
                               "' at parameter " + std::to_string(i));
      auto dst = params[i].mutable_values();
      auto src = stored[i].values();
      std::copy(src.begin(), src.end(), dst.begin());
    }
  }
}

AgentBundle agent_from_checkpoint(const Checkpoint& ckpt) {
  AgentBundle agent = build_agent(ckpt.config, 0);
  agent.load_network_tensors(ckpt.networks);
  return agent;
}

EvalRecord evaluate_policy(const RunConfig& cfg, AgentBundle& agent,
                           std::size_t step, std::uint64_t seed,
                           double wall_clock_s) {
  auto env = make_env(cfg.env);
  const bool discrete = env->spec().kind == ActionKind::discrete;
  std::vector<double> returns;
  returns.reserve(cfg.eval_episodes);
  for (std::size_t e = 0; e < cfg.eval_episodes; ++e) {
    Rng eval_rng(derive(seed, kEvalTag, step * 1009 + e));
    auto state = env->reset(derive(seed, kEvalTag ^ 0xff, step * 1009 + e));
    double ret = 0.0;
    bool done = false;
    while (!done) {
      StepResult r;
      if (discrete) {
        r = env->step_discrete(
            agent.dqn->act(state, cfg.eval_epsilon, eval_rng));
      } else if (agent.ddpg) {
        r = env->step_continuous(agent.ddpg->act(state, 0.0, eval_rng));
      } else if (agent.bcq) {
        r = env->step_continuous(agent.bcq->act(state, eval_rng));
      } else {
        r = env->step_continuous(agent.bc->act(state));
      }
      ret += r.reward;
      state = r.state;
      done = r.done;
    }
    returns.push_back(ret);
  }
  return make_eval_record(step, seed, std::move(returns), wall_clock_s);
}

namespace {

struct SeedOutcome {
  std::vector<EvalRecord> records;
  std::map<std::string, std::vector<Tensor>> best_tensors;
  std::map<std::string, std::vector<Tensor>> final_tensors;
  double best_mean = 0.0;
  bool has_best = false;
};

std::map<std::string, std::vector<Tensor>> snapshot_tensors(
    AgentBundle& agent) {
  std::map<std::string, std::vector<Tensor>> out;
  for (auto& [name, params] : agent.network_tensors()) {
    std::vector<Tensor> copies;
    copies.reserve(params.size());
    for (const Tensor& p : params) copies.push_back(p.clone(false));
    out[name] = std::move(copies);
  }
  return out;
}

void maybe_record_eval(const RunConfig& cfg, AgentBundle& agent,
                       SeedOutcome& outcome, std::size_t step,
                       std::uint64_t seed,
                       std::chrono::steady_clock::time_point t0,
                       bool* stop) {
  EvalRecord rec =
      evaluate_policy(cfg, agent, step, seed, seconds_since(t0));
  if (!outcome.has_best || rec.mean > outcome.best_mean) {
    outcome.has_best = true;
    outcome.best_mean = rec.mean;
    outcome.best_tensors = snapshot_tensors(agent);
  }
  const double mean = rec.mean;
  outcome.records.push_back(std::move(rec));
  if (cfg.stop_at_target && mean >= cfg.target_return) *stop = true;
}

SeedOutcome run_online_seed(const RunConfig& cfg, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto env = make_env(cfg.env);
  const EnvSpec& spec = env->spec();
  const bool discrete = spec.kind == ActionKind::discrete;

  AgentBundle agent = build_agent(cfg, seed);
  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng explore(derive(seed, kExploreTag));
  Rng sampler(derive(seed, kBufferTag));

  SeedOutcome outcome;
  std::uint64_t episode = 0;
  auto state = env->reset(derive(seed, kEnvTag, episode++));
  bool stop = false;

  for (std::size_t step = 1; step <= cfg.total_steps && !stop; ++step) {
    Transition t;
    t.state = state;
    StepResult r;
    if (discrete) {
      const double frac =
          cfg.eps_decay_steps
              ? std::min(1.0, double(step) / double(cfg.eps_decay_steps))
              : 1.0;
      const double eps = cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
      const std::size_t a =
          step <= cfg.warmup_steps
              ? explore.uniform_index(spec.action_dim)
              : agent.dqn->act(state, eps, explore);
      t.action_index = std::uint32_t(a);
      r = env->step_discrete(a);
    } else {
      std::vector<double> a;
      if (step <= cfg.warmup_steps) {
        a.resize(spec.action_dim);
        for (double& x : a)
          x = explore.uniform(-spec.max_action, spec.max_action);
      } else {
        a = agent.ddpg->act(state, cfg.exploration_noise, explore);
      }
      t.action = a;
      r = env->step_continuous(a);
    }
    t.reward = r.reward;
    t.next_state = r.state;
    t.done = r.done;
    buffer.push(std::move(t));
    state = r.done ? env->reset(derive(seed, kEnvTag, episode++)) : r.state;

    if (step > cfg.warmup_steps) {
      if (discrete)
        agent.dqn->update(buffer, sampler);
      else
        agent.ddpg->update(buffer, sampler);
    }
    if (step % cfg.eval_period == 0)
      maybe_record_eval(cfg, agent, outcome, step, seed, t0, &stop);
  }
  outcome.final_tensors = snapshot_tensors(agent);
  if (!outcome.has_best) outcome.best_tensors = outcome.final_tensors;
  return outcome;
}

SeedOutcome run_offline_seed(const RunConfig& cfg, std::uint64_t seed,
                             const ReplayBuffer& data) {
  const auto t0 = std::chrono::steady_clock::now();
  AgentBundle agent = build_agent(cfg, seed);
  Rng sampler(derive(seed, kDataTag));

  SeedOutcome outcome;
  bool stop = false;
  // Offline learners step on dataset batches only; the environment is used
  // solely for evaluation.
  for (std::size_t step = 1; step <= cfg.total_steps && !stop; ++step) {
    if (agent.bcq)
      agent.bcq->update(data, sampler);
    else
      agent.bc->update(data, sampler);
    if (step % cfg.eval_period == 0)
      maybe_record_eval(cfg, agent, outcome, step, seed, t0, &stop);
  }
  outcome.final_tensors = snapshot_tensors(agent);
  if (!outcome.has_best) outcome.best_tensors = outcome.final_tensors;
  return outcome;
}

void write_resolved_config(const std::filesystem::path& path,
                           const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw IoError("run: cannot write " + path.string());
  os << "# resolved run configuration\n";
  os << "# budgets are desk-scale: online step budgets and eval cadence are\n";
  os << "# scaled down ~10x-500x from the reference large-scale settings\n";
  os << serialize_config(cfg);
}

}  // namespace

TrainOutcome run_training(const RunConfig& raw_cfg,
                          const std::filesystem::path& out_dir) {
  RunConfig cfg = raw_cfg;
  cfg.resolve_and_validate();

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("run: cannot create " + out_dir.string());
  write_resolved_config(out_dir / "config.resolved", cfg);

  std::optional<ReplayBuffer> data;
  if (cfg.offline()) {
    Dataset ds = read_dataset(cfg.dataset);
    if (ds.header.env_id != cfg.env)
      throw UsageError("dataset: env '" + ds.header.env_id +
                       "' does not match configured env '" + cfg.env + "'");
    if (ds.transitions.empty())
      throw UsageError("dataset: no transitions in " + cfg.dataset);
    data.emplace(dataset_to_buffer(ds));
  }

  const std::size_t n = cfg.seeds.size();
  std::vector<SeedOutcome> outcomes(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::size_t workers = cfg.max_workers
                            ? cfg.max_workers
                            : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        outcomes[i] = cfg.offline()
                          ? run_offline_seed(cfg, cfg.seeds[i], *data)
                          : run_online_seed(cfg, cfg.seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  TrainOutcome result;
  result.run_dir = out_dir;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t seed = cfg.seeds[i];
    result.per_seed.push_back(outcomes[i].records);
    write_eval_csv(out_dir / ("eval_seed" + std::to_string(seed) + ".csv"),
                   outcomes[i].records);

    Checkpoint best{cfg, std::move(outcomes[i].best_tensors)};
    Checkpoint last{cfg, std::move(outcomes[i].final_tensors)};
    auto best_path =
        out_dir / ("best_seed" + std::to_string(seed) + ".ckpt.json");
    auto final_path =
        out_dir / ("final_seed" + std::to_string(seed) + ".ckpt.json");
    save_checkpoint(best_path, best);
    save_checkpoint(final_path, last);
    result.best_checkpoints.push_back(best_path);
    result.final_checkpoints.push_back(final_path);
  }
  write_aggregate_csv(out_dir / "aggregate.csv", result.per_seed);
  write_learning_curve_svg(out_dir / "learning_curve.svg", result.per_seed,
                           cfg.algorithm + "/" + cfg.variant + "/" +
                               cfg.coder + " on " + cfg.env);
  return result;
}

AblationOutcome run_ablation(const RunConfig& base,
                             const std::filesystem::path& out_dir) {
  struct RowSpec {
    const char* label;
    const char* variant;
    const char* coder;
  };
  static const RowSpec kRows[] = {
      {"none_ann", "ann", "none"},
      {"rate_snn", "spiking", "rate"},
      {"accum_snn", "spiking", "accumulate"},
      {"adapt_ann", "ann", "adaptive"},
      {"adapt_snn", "spiking", "adaptive"},
  };

  AblationOutcome outcome;
  outcome.dir = out_dir;
  std::filesystem::create_directories(out_dir);
  for (const RowSpec& row : kRows) {
    RunConfig cfg = base;
    cfg.variant = row.variant;
    cfg.coder = row.coder;
    cfg.stop_at_target = false;  // matched budgets across the grid
    TrainOutcome t = run_training(cfg, out_dir / row.label);
    AblationRow r = max_average_return(t.per_seed);
    r.label = row.label;
    r.variant = row.variant;
    r.coder = row.coder;
    outcome.rows.push_back(r);
  }
  write_ablation_csv(out_dir / "ablation.csv", outcome.rows);
  return outcome;
}

CollectOutcome run_collect(const std::string& env_id,
                           const std::string& checkpoint_path,
                           std::size_t size, double noise, std::uint64_t seed,
                           const std::filesystem::path& out_file) {
  auto env = make_env(env_id);
  const EnvSpec& spec = env->spec();
  const bool discrete = spec.kind == ActionKind::discrete;

  PolicyHash hash{};
  std::optional<AgentBundle> agent;
  if (checkpoint_path != "random") {
    Checkpoint ckpt = load_checkpoint(checkpoint_path);
    if (ckpt.config.env != env_id)
      throw UsageError("collect: checkpoint env '" + ckpt.config.env +
                       "' does not match '" + env_id + "'");
    agent = agent_from_checkpoint(ckpt);
    hash = hash_file(checkpoint_path);
  }

  CollectStats stats;
  Dataset data;
  if (discrete) {
    DiscretePolicy policy = [&](const std::vector<double>& s,
                                Rng& rng) -> std::size_t {
      if (!agent) return rng.uniform_index(spec.action_dim);
      return agent->dqn->act(s, noise, rng);
    };
    data = collect_dataset_discrete(*env, policy, size, seed, hash, &stats);
  } else {
    ContinuousPolicy policy = [&](const std::vector<double>& s,
                                  Rng& rng) -> std::vector<double> {
      std::vector<double> a;
      if (!agent) {
        a.resize(spec.action_dim);
        for (double& x : a) x = rng.uniform(-spec.max_action, spec.max_action);
        return a;
      }
      if (agent->ddpg)
        a = agent->ddpg->act(s, 0.0, rng);
      else if (agent->bcq)
        a = agent->bcq->act(s, rng);
      else
        a = agent->bc->act(s);
      for (double& x : a) {
        if (noise > 0.0) x += rng.normal(0.0, noise * spec.max_action);
        x = std::clamp(x, -spec.max_action, spec.max_action);
      }
      return a;
    };
    data = collect_dataset(*env, policy, size, seed, hash, &stats);
  }
  write_dataset(out_file, data);
  return {out_file, stats, data.header.count};
}

// ---------------------------------------------------------------------------
// Power measurement

namespace {

struct PowerAccum {
  double synops_sum = 0.0;
  std::vector<double> rate_sum;
  std::uint64_t inferences = 0;
};

void accumulate(PowerAccum& acc, const SpikeRecorder& rec,
                const std::vector<std::size_t>& widths,
                std::size_t timesteps) {
  if (rec.trains().empty()) return;
  SynOpsReport r = synops_snn(rec.trains(), widths, timesteps);
  acc.synops_sum += double(r.total) / double(r.batch);
  if (acc.rate_sum.size() < r.layers.size()) acc.rate_sum.resize(r.layers.size());
  for (std::size_t i = 0; i < r.layers.size(); ++i)
    acc.rate_sum[i] += r.layers[i].mean_rate;
  acc.inferences += 1;
}

std::vector<std::size_t> approx_widths(const Approx& net) {
  std::vector<std::size_t> w{net.config().input_dim};
  w.insert(w.end(), net.config().hidden.begin(), net.config().hidden.end());
  w.push_back(net.config().output_dim);
  return w;
}

}  // namespace

std::vector<PowerSection> run_power(const Checkpoint& ckpt,
                                    std::size_t episodes,
                                    const std::filesystem::path& out_json) {
  const RunConfig& cfg = ckpt.config;
  AgentBundle agent = agent_from_checkpoint(ckpt);
  const bool spiking = cfg.variant == "spiking";

  // Networks exercised by the acting path, with attached recorders.
  std::vector<std::pair<std::string, Approx*>> nets;
  if (agent.dqn) {
    nets.emplace_back("q", &agent.dqn->q());
  } else if (agent.ddpg) {
    nets.emplace_back("actor", &agent.ddpg->actor());
  } else if (agent.bcq) {
    nets.emplace_back("critic1", &agent.bcq->critic1());
    nets.emplace_back("perturb", &agent.bcq->perturb());
  } else if (agent.bc) {
    nets.emplace_back("policy", &agent.bc->policy());
  }

  std::vector<SpikeRecorder> recorders(nets.size());
  std::vector<PowerAccum> accums(nets.size());
  if (spiking)
    for (std::size_t i = 0; i < nets.size(); ++i)
      nets[i].second->set_recorder(&recorders[i]);

  auto env = make_env(cfg.env);
  const bool discrete = env->spec().kind == ActionKind::discrete;
  for (std::size_t e = 0; e < episodes; ++e) {
    Rng rng(derive(0x9077, kEvalTag, e));
    auto state = env->reset(derive(1, kEvalTag, e));
    bool done = false;
    while (!done) {
      StepResult r;
      if (discrete) {
        r = env->step_discrete(agent.dqn->act(state, cfg.eval_epsilon, rng));
      } else if (agent.ddpg) {
        r = env->step_continuous(agent.ddpg->act(state, 0.0, rng));
      } else if (agent.bcq) {
        r = env->step_continuous(agent.bcq->act(state, rng));
      } else {
        r = env->step_continuous(agent.bc->act(state));
      }
      if (spiking)
        for (std::size_t i = 0; i < nets.size(); ++i)
          accumulate(accums[i], recorders[i], approx_widths(*nets[i].second),
                     cfg.timesteps);
      state = r.state;
      done = r.done;
    }
  }

  std::vector<PowerSection> sections;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    PowerSection s;
    s.network = nets[i].first;
    s.spiking = spiking;
    const auto widths = approx_widths(*nets[i].second);
    s.ann_synops = synops_ann(widths).total;
    if (spiking && accums[i].inferences) {
      s.snn_synops = accums[i].synops_sum / double(accums[i].inferences);
      for (double r : accums[i].rate_sum)
        s.layer_rates.push_back(r / double(accums[i].inferences));
      const bool has_decoder = cfg.coder != "accumulate";
      s.coder_ops = double(coder_dense_ops(cfg.timesteps,
                                           nets[i].second->config().input_dim,
                                           nets[i].second->config().output_dim,
                                           has_decoder));
      s.inferences = accums[i].inferences;
    }
    sections.push_back(std::move(s));
  }
  if (!out_json.empty()) write_power_json(out_json, sections, cfg.timesteps);
  return sections;
}

}  // namespace acsf
