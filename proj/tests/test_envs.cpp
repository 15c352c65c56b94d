#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "acsf/dataset.hpp"
#include "acsf/env.hpp"

using namespace acsf;
namespace fs = std::filesystem;

TEST_CASE("cartpole basics") {
  auto env = make_env("cartpole");
  CHECK(env->spec().state_dim == 4);
  CHECK(env->spec().action_dim == 2);
  CHECK(env->spec().kind == ActionKind::discrete);

  auto s = env->reset(42);
  REQUIRE(s.size() == 4);
  for (double x : s) CHECK(std::abs(x) <= 0.05);

  // constant action topples the pole well before the cap
  std::size_t steps = 0;
  bool done = false;
  while (!done) {
    auto r = env->step_discrete(0);
    ++steps;
    done = r.done;
    CHECK(r.reward == 1.0);
    REQUIRE(steps <= 500);
  }
  CHECK(steps < 500);
  CHECK_THROWS_AS(env->step_discrete(0), std::logic_error);
  CHECK_THROWS_AS(env->step_continuous({0.0}), std::logic_error);
}

TEST_CASE("cartpole determinism and episode cap") {
  auto a = make_env("cartpole");
  auto b = make_env("cartpole");
  auto sa = a->reset(7);
  auto sb = b->reset(7);
  CHECK(sa == sb);
  Rng rng(3);
  bool done = false;
  while (!done) {
    const std::size_t act = rng.uniform_index(2);
    auto ra = a->step_discrete(act);
    auto rb = b->step_discrete(act);
    CHECK(ra.state == rb.state);
    CHECK(ra.done == rb.done);
    done = ra.done;
  }

  // alternating actions balance long enough to show the cap at work:
  // a crude balancing policy (push against the lean) reaches 500
  auto c = make_env("cartpole");
  auto s = c->reset(11);
  std::size_t count = 0;
  bool fin = false;
  while (!fin) {
    const std::size_t act = s[2] + 0.1 * s[3] > 0 ? 1 : 0;
    auto r = c->step_discrete(act);
    s = r.state;
    fin = r.done;
    ++count;
    REQUIRE(count <= 500);
  }
  CHECK(count == 500);
}

TEST_CASE("pendulum basics") {
  auto env = make_env("pendulum");
  CHECK(env->spec().state_dim == 3);
  CHECK(env->spec().action_dim == 1);
  CHECK(env->spec().max_action == 2.0);

  auto s = env->reset(5);
  REQUIRE(s.size() == 3);
  // (cos, sin, thdot) with thdot in [-1, 1] at reset
  CHECK(std::abs(s[0] * s[0] + s[1] * s[1] - 1.0) < 1e-12);
  CHECK(std::abs(s[2]) <= 1.0);

  // rewards are never positive; speed stays clamped under wild torques
  Rng rng(9);
  bool done = false;
  std::size_t steps = 0;
  while (!done) {
    auto r = env->step_continuous({rng.uniform(-2, 2)});
    CHECK(r.reward <= 0.0);
    CHECK(std::abs(r.state[2]) <= 8.0);
    for (double x : r.state) CHECK(std::isfinite(x));
    done = r.done;
    ++steps;
  }
  CHECK(steps == 200);
  CHECK_THROWS_AS(env->step_continuous({0.0}), std::logic_error);
}

TEST_CASE("pendulum upright equilibrium has zero cost") {
  // theta = 0, thdot = 0, u = 0 gives reward exactly 0; engineered by
  // searching reset seeds is flaky, so drive the dynamics by hand instead:
  // reward depends only on the pre-step state and torque.
  auto env = make_env("pendulum");
  // find a seed starting near upright to keep the first-step cost tiny
  double best_cost = 1e9;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto s = env->reset(seed);
    const double theta = std::atan2(s[1], s[0]);
    const double cost = theta * theta + 0.1 * s[2] * s[2];
    best_cost = std::min(best_cost, cost);
  }
  CHECK(best_cost < 0.5);

  // the reward of a zero-torque step from a state is the negated cost of
  // that state, and it is bounded above by zero
  auto s = env->reset(123);
  const double theta = std::atan2(s[1], s[0]);
  auto r = env->step_continuous({0.0});
  CHECK(r.reward ==
        doctest::Approx(-(theta * theta + 0.1 * s[2] * s[2])).epsilon(1e-12));
}

TEST_CASE("unknown environment id") {
  CHECK_THROWS_AS(make_env("atari"), std::invalid_argument);
}

TEST_CASE("dataset round trip") {
  const fs::path path = fs::temp_directory_path() / "acsf_test_data.acsf";

  auto env = make_env("pendulum");
  ContinuousPolicy random_policy = [&](const std::vector<double>&, Rng& rng) {
    return std::vector<double>{rng.uniform(-2, 2)};
  };
  PolicyHash hash{};
  hash[0] = 0xab;
  CollectStats stats;
  Dataset data = collect_dataset(*env, random_policy, 500, 77, hash, &stats);
  CHECK(data.header.count == 500);
  CHECK(data.header.env_id == "pendulum");
  CHECK(stats.episodes == 2);  // 500 transitions over 200-step episodes

  write_dataset(path, data);
  Dataset loaded = read_dataset(path);
  CHECK(loaded.header.env_id == data.header.env_id);
  CHECK(loaded.header.count == data.header.count);
  CHECK(loaded.header.seed == data.header.seed);
  CHECK(loaded.header.policy_hash == data.header.policy_hash);
  REQUIRE(loaded.transitions.size() == data.transitions.size());
  for (std::size_t i = 0; i < loaded.transitions.size(); ++i) {
    const Transition& a = loaded.transitions[i];
    const Transition& b = data.transitions[i];
    CHECK(a.state == b.state);
    CHECK(a.action == b.action);
    CHECK(a.reward == b.reward);
    CHECK(a.next_state == b.next_state);
    CHECK(a.done == b.done);
  }
  fs::remove(path);
}

TEST_CASE("empty dataset file is valid") {
  const fs::path path = fs::temp_directory_path() / "acsf_empty.acsf";
  auto env = make_env("pendulum");
  ContinuousPolicy p = [](const std::vector<double>&, Rng&) {
    return std::vector<double>{0.0};
  };
  Dataset data = collect_dataset(*env, p, 0, 1, PolicyHash{}, nullptr);
  CHECK(data.header.count == 0);
  write_dataset(path, data);
  Dataset loaded = read_dataset(path);
  CHECK(loaded.header.count == 0);
  CHECK(loaded.transitions.empty());
  fs::remove(path);
}

TEST_CASE("dataset collection is seed-deterministic") {
  auto env1 = make_env("cartpole");
  auto env2 = make_env("cartpole");
  DiscretePolicy p = [](const std::vector<double>&, Rng& rng) {
    return rng.uniform_index(2);
  };
  Dataset a = collect_dataset_discrete(*env1, p, 300, 5, PolicyHash{}, nullptr);
  Dataset b = collect_dataset_discrete(*env2, p, 300, 5, PolicyHash{}, nullptr);
  for (std::size_t i = 0; i < 300; ++i) {
    CHECK(a.transitions[i].state == b.transitions[i].state);
    CHECK(a.transitions[i].action_index == b.transitions[i].action_index);
  }

  // policy/environment kind mismatch is a contract error
  auto cont_env = make_env("pendulum");
  CHECK_THROWS_AS(
      collect_dataset_discrete(*cont_env, p, 10, 1, PolicyHash{}, nullptr),
      std::logic_error);
}

TEST_CASE("corrupt dataset files are rejected") {
  const fs::path path = fs::temp_directory_path() / "acsf_corrupt.acsf";
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOPE garbage";
  }
  CHECK_THROWS_AS(read_dataset(path), std::runtime_error);
  CHECK_THROWS_AS(read_dataset(fs::temp_directory_path() / "missing.acsf"),
                  std::runtime_error);
  fs::remove(path);
}
