// Command-line driver: train / eval / ablate / collect / power.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "acsf/runner.hpp"

namespace fs = std::filesystem;
using namespace acsf;

namespace {

struct ConfigOptions {
  std::string config_file;
  std::vector<std::pair<std::string, CLI::Option*>> overrides;
  std::vector<std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file,
                    "key = value configuration file");
    const auto& keys = run_config_keys();
    values.resize(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
      auto* opt = cmd->add_option("--" + keys[i], values[i],
                                  "override config key '" + keys[i] + "'");
      overrides.emplace_back(keys[i], opt);
    }
  }

  RunConfig build() const {
    RunConfig cfg;
    if (!config_file.empty())
      for (const auto& [k, v] : parse_config_file(config_file))
        apply_kv(cfg, k, v);
    for (std::size_t i = 0; i < overrides.size(); ++i)
      if (overrides[i].second->count() > 0)
        apply_kv(cfg, overrides[i].first, values[i]);
    cfg.resolve_and_validate();
    return cfg;
  }
};

void print_eval_record(const EvalRecord& r) {
  std::cout << "step " << r.step << ", seed " << r.seed << ": mean "
            << r.mean << " +- " << r.stddev << " over " << r.returns.size()
            << " episodes [";
  for (std::size_t i = 0; i < r.returns.size(); ++i)
    std::cout << (i ? ", " : "") << r.returns[i];
  std::cout << "]\n";
}

int run(int argc, char** argv) {
  CLI::App app{"spiking reinforcement-learning workbench (temporal coders, "
               "LIF networks, DQN/DDPG/BCQ/BC)"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "train one configuration over "
                                            "all seeds");
  ConfigOptions train_cfg;
  train_cfg.attach(train);
  std::string train_out = "runs/latest";
  train->add_option("--out", train_out, "run directory");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint with the "
                                          "standard protocol");
  std::string eval_ckpt;
  std::size_t eval_episodes = 10;
  double eval_eps = -1.0;
  std::uint64_t eval_seed = 1;
  eval->add_option("checkpoint", eval_ckpt)->required();
  eval->add_option("--episodes", eval_episodes, "episodes per record");
  eval->add_option("--epsilon", eval_eps,
                   "exploration rate; default 0.05 discrete, 0 continuous");
  eval->add_option("--seed", eval_seed, "evaluation seed");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "run the 5-row coder/network "
                                              "grid");
  ConfigOptions ablate_cfg;
  ablate_cfg.attach(ablate);
  std::string ablate_out = "runs/ablation";
  ablate->add_option("--out", ablate_out, "output directory");

  // collect
  auto* collect = app.add_subcommand("collect", "roll a behavior policy into "
                                                "a dataset file");
  std::string col_env = "pendulum", col_ckpt = "random", col_out = "data.acsf";
  std::size_t col_size = 50000;
  double col_noise = 0.0;
  std::uint64_t col_seed = 1;
  collect->add_option("--env", col_env, "environment id");
  collect->add_option("--checkpoint", col_ckpt,
                      "behavior policy checkpoint, or 'random'");
  collect->add_option("--size", col_size, "transitions to record");
  collect->add_option("--noise", col_noise,
                      "action noise fraction (continuous) or epsilon "
                      "(discrete)");
  collect->add_option("--seed", col_seed, "collection seed");
  collect->add_option("--out", col_out, "dataset file");

  // power
  auto* power = app.add_subcommand("power", "synaptic-operation counts for a "
                                            "checkpoint");
  std::string pow_ckpt, pow_out;
  std::size_t pow_episodes = 10;
  power->add_option("checkpoint", pow_ckpt)->required();
  power->add_option("--episodes", pow_episodes, "evaluation episodes");
  power->add_option("--out", pow_out, "JSON report path (default: next to "
                                      "the checkpoint)");

  CLI11_PARSE(app, argc, argv);

  if (*train) {
    RunConfig cfg = train_cfg.build();
    TrainOutcome out = run_training(cfg, train_out);
    std::cout << "run directory: " << out.run_dir.string() << "\n";
    for (std::size_t i = 0; i < out.per_seed.size(); ++i) {
      double best = 0.0;
      bool has = false;
      for (const EvalRecord& r : out.per_seed[i])
        if (!has || r.mean > best) {
          best = r.mean;
          has = true;
        }
      std::cout << "seed " << cfg.seeds[i] << ": " << out.per_seed[i].size()
                << " evals, best mean "
                << (has ? std::to_string(best) : std::string("n/a")) << "\n";
    }
  } else if (*eval) {
    Checkpoint ckpt = load_checkpoint(eval_ckpt);
    AgentBundle agent = agent_from_checkpoint(ckpt);
    RunConfig cfg = ckpt.config;
    cfg.eval_episodes = eval_episodes;
    const bool discrete = make_env(cfg.env)->spec().kind ==
                          ActionKind::discrete;
    cfg.eval_epsilon = eval_eps >= 0.0 ? eval_eps : (discrete ? 0.05 : 0.0);
    EvalRecord rec = evaluate_policy(cfg, agent, 0, eval_seed, 0.0);
    print_eval_record(rec);
    write_eval_csv(fs::path(eval_ckpt + ".eval.csv"), {rec});
  } else if (*ablate) {
    RunConfig cfg = ablate_cfg.build();
    AblationOutcome out = run_ablation(cfg, ablate_out);
    std::cout << "label,variant,coder,max_avg_return,std\n";
    for (const AblationRow& r : out.rows)
      std::cout << r.label << "," << r.variant << "," << r.coder << ","
                << r.max_avg_return << "," << r.std_at_max << "\n";
    std::cout << "table: " << (out.dir / "ablation.csv").string() << "\n";
  } else if (*collect) {
    CollectOutcome out =
        run_collect(col_env, col_ckpt, col_size, col_noise, col_seed, col_out);
    std::cout << "dataset: " << out.file.string() << "\n"
              << "transitions: " << out.count << "\n"
              << "episodes: " << out.stats.episodes << "\n"
              << "behavior mean episode return: "
              << out.stats.mean_episode_return << "\n";
  } else if (*power) {
    Checkpoint ckpt = load_checkpoint(pow_ckpt);
    fs::path out_json = pow_out.empty()
                            ? fs::path(pow_ckpt).parent_path() / "synops.json"
                            : fs::path(pow_out);
    auto sections = run_power(ckpt, pow_episodes, out_json);
    for (const PowerSection& s : sections) {
      std::cout << s.network << ": ";
      if (s.spiking)
        std::cout << "spiking synops/inference " << s.snn_synops
                  << " (+ coder ops " << s.coder_ops << "), matched static "
                  << s.ann_synops << "\n";
      else
        std::cout << "static synops " << s.ann_synops << "\n";
    }
    std::cout << "report: " << out_json.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  }
}
