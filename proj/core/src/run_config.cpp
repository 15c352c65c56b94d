#include "acsf/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace acsf {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config: " + key + ": cannot parse '" + v +
                     "' as a real number");
  }
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return std::size_t(x);
  } catch (const std::exception&) {
    throw UsageError("config: " + key + ": cannot parse '" + v +
                     "' as an integer");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw UsageError("config: " + key + ": expected true/false, got '" + v + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& v,
                          T (*one)(const std::string&, const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(one(key, item));
  }
  return out;
}

std::size_t parse_size_item(const std::string& key, const std::string& v) {
  return parse_size(key, v);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  return os.str();
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = [] {
    std::vector<Field> f;
    auto str = [&](const char* k, std::string RunConfig::* m) {
      f.push_back({k, [m](RunConfig& c, const std::string& v) { c.*m = v; },
                   [m](const RunConfig& c) { return c.*m; }});
    };
    auto real = [&](const char* k, double RunConfig::* m) {
      f.push_back({k,
                   [m, k](RunConfig& c, const std::string& v) {
                     c.*m = parse_double(k, v);
                   },
                   [m](const RunConfig& c) { return format_double(c.*m); }});
    };
    auto size = [&](const char* k, std::size_t RunConfig::* m) {
      f.push_back({k,
                   [m, k](RunConfig& c, const std::string& v) {
                     c.*m = parse_size(k, v);
                   },
                   [m](const RunConfig& c) { return std::to_string(c.*m); }});
    };
    auto boolean = [&](const char* k, bool RunConfig::* m) {
      f.push_back({k,
                   [m, k](RunConfig& c, const std::string& v) {
                     c.*m = parse_bool(k, v);
                   },
                   [m](const RunConfig& c) {
                     return (c.*m) ? std::string("true") : std::string("false");
                   }});
    };

    str("algorithm", &RunConfig::algorithm);
    str("variant", &RunConfig::variant);
    str("coder", &RunConfig::coder);
    str("env", &RunConfig::env);
    str("dataset", &RunConfig::dataset);
    size("timesteps", &RunConfig::timesteps);
    real("lif_beta", &RunConfig::lif_beta);
    real("lif_threshold", &RunConfig::lif_threshold);
    real("lif_reset", &RunConfig::lif_reset);
    real("surrogate_alpha", &RunConfig::surrogate_alpha);
    f.push_back({"hidden",
                 [](RunConfig& c, const std::string& v) {
                   c.hidden = parse_list<std::size_t>("hidden", v,
                                                      parse_size_item);
                 },
                 [](const RunConfig& c) { return join(c.hidden); }});
    f.push_back({"vae_hidden",
                 [](RunConfig& c, const std::string& v) {
                   c.vae_hidden = parse_list<std::size_t>("vae_hidden", v,
                                                          parse_size_item);
                 },
                 [](const RunConfig& c) { return join(c.vae_hidden); }});
    size("latent_dim", &RunConfig::latent_dim);
    real("gamma", &RunConfig::gamma);
    real("tau", &RunConfig::tau);
    size("target_copy_period", &RunConfig::target_copy_period);
    real("learning_rate", &RunConfig::learning_rate);
    real("bc_learning_rate", &RunConfig::bc_learning_rate);
    size("batch_size", &RunConfig::batch_size);
    size("buffer_capacity", &RunConfig::buffer_capacity);
    real("lambda", &RunConfig::lambda);
    size("n_samples", &RunConfig::n_samples);
    real("phi", &RunConfig::phi);
    real("eps_start", &RunConfig::eps_start);
    real("eps_end", &RunConfig::eps_end);
    size("eps_decay_steps", &RunConfig::eps_decay_steps);
    real("eval_epsilon", &RunConfig::eval_epsilon);
    real("exploration_noise", &RunConfig::exploration_noise);
    size("warmup_steps", &RunConfig::warmup_steps);
    f.push_back({"seeds",
                 [](RunConfig& c, const std::string& v) {
                   c.seeds.clear();
                   for (auto s : parse_list<std::size_t>("seeds", v,
                                                         parse_size_item))
                     c.seeds.push_back(std::uint64_t(s));
                 },
                 [](const RunConfig& c) { return join(c.seeds); }});
    size("total_steps", &RunConfig::total_steps);
    size("eval_period", &RunConfig::eval_period);
    size("eval_episodes", &RunConfig::eval_episodes);
    size("max_workers", &RunConfig::max_workers);
    boolean("stop_at_target", &RunConfig::stop_at_target);
    real("target_return", &RunConfig::target_return);
    return f;
  }();
  return kFields;
}

}  // namespace

const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> kKeys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return kKeys;
}

void apply_kv(RunConfig& cfg, const std::string& key,
              const std::string& value) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      f.set(cfg, value);
      return;
    }
  }
  throw UsageError("config: unknown key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("config: cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config: " + path.string() + ":" +
                       std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const Field& f : fields()) os << f.key << " = " << f.get(cfg) << "\n";
  return os.str();
}

RunConfig config_from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  RunConfig cfg;
  for (const auto& [k, v] : kv) apply_kv(cfg, k, v);
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_to_kv(
    const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Field& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

void RunConfig::resolve_and_validate() {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };

  require(algorithm == "dqn" || algorithm == "ddpg" || algorithm == "bcq" ||
              algorithm == "bc",
          "algorithm: must be dqn, ddpg, bcq, or bc");
  require(variant == "ann" || variant == "spiking",
          "variant: must be ann or spiking");
  require(coder == "adaptive" || coder == "rate" || coder == "accumulate" ||
              coder == "none",
          "coder: must be adaptive, rate, accumulate, or none");
  require(!(coder == "none" && variant != "ann"),
          "coder: none requires variant = ann");
  require(!(variant == "ann" && (coder == "rate" || coder == "accumulate")),
          "coder: rate/accumulate require variant = spiking");
  require(env == "cartpole" || env == "pendulum",
          "env: must be cartpole or pendulum");
  require(!offline() || !dataset.empty(),
          "dataset: required for offline algorithms (bcq, bc)");
  require(timesteps >= 1, "timesteps: must be >= 1");
  require(lif_beta > 0.0 && lif_beta <= 1.0, "lif_beta: must be in (0, 1]");
  require(surrogate_alpha > 0.0, "surrogate_alpha: must be > 0");
  require(lif_threshold > lif_reset,
          "lif_threshold: must exceed lif_reset");
  require(!hidden.empty(), "hidden: at least one hidden layer");
  require(gamma >= 0.0 && gamma <= 1.0, "gamma: must be in [0, 1]");
  require(tau >= 0.0 && tau <= 1.0, "tau: must be in [0, 1]");
  require(lambda >= 0.0 && lambda <= 1.0, "lambda: must be in [0, 1]");
  require(n_samples >= 1, "n_samples: must be >= 1");
  require(eval_episodes >= 1, "eval_episodes: must be >= 1");
  require(eval_period >= 1, "eval_period: must be >= 1");
  require(!seeds.empty(), "seeds: at least one seed");
  require(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 &&
              eps_end <= 1.0,
          "eps_start/eps_end: must be in [0, 1]");
  require(eval_epsilon >= 0.0 && eval_epsilon <= 1.0,
          "eval_epsilon: must be in [0, 1]");

  if (batch_size == 0) batch_size = algorithm == "dqn" ? 32 : 100;
  if (total_steps == std::size_t(-1)) total_steps = offline() ? 50000 : 100000;
  if (algorithm == "bcq" || algorithm == "ddpg" || algorithm == "bc") {
    // continuous-control algorithms need a continuous environment
    require(env != "cartpole" || algorithm == "dqn",
            "env: " + algorithm + " needs a continuous action space");
  }
  require(algorithm != "dqn" || env == "cartpole",
          "env: dqn needs a discrete action space");

  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw UsageError(msg);
  }
}

}  // namespace acsf
