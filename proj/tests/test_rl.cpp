#include <doctest.h>

#include <cmath>

#include "acsf/bc.hpp"
#include "acsf/bcq.hpp"
#include "acsf/ddpg.hpp"
#include "acsf/dqn.hpp"
#include "acsf/vae.hpp"
#include "fd_check.hpp"

using namespace acsf;
using acsf::testing::fd_max_rel_err;

namespace {

ApproxConfig ann_value(std::size_t in, std::size_t out) {
  ApproxConfig c;
  c.variant = NetVariant::ann;
  c.coder = CoderKind::none;
  c.input_dim = in;
  c.output_dim = out;
  c.hidden = {8, 8};
  return c;
}

ApproxConfig spiking_value(std::size_t in, std::size_t out) {
  ApproxConfig c = ann_value(in, out);
  c.variant = NetVariant::spiking;
  c.coder = CoderKind::adaptive;
  return c;
}

Transition make_transition(std::vector<double> s, std::uint32_t a, double r,
                           std::vector<double> s2, bool done) {
  Transition t;
  t.state = std::move(s);
  t.action_index = a;
  t.reward = r;
  t.next_state = std::move(s2);
  t.done = done;
  return t;
}

Transition make_ctransition(std::vector<double> s, std::vector<double> a,
                            double r, std::vector<double> s2, bool done) {
  Transition t;
  t.state = std::move(s);
  t.action = std::move(a);
  t.reward = r;
  t.next_state = std::move(s2);
  t.done = done;
  return t;
}

// Q network with hand-set outputs: a linear map from one-hot states.
std::unique_ptr<Approx> constant_q(std::size_t states, std::size_t actions,
                                   const std::vector<double>& table,
                                   Rng& rng) {
  ApproxConfig c;
  c.variant = NetVariant::ann;
  c.coder = CoderKind::none;
  c.input_dim = states;
  c.output_dim = actions;
  c.hidden = {states};
  auto q = make_approx(c, rng);
  // not exactly a table, so instead zero everything and use biases
  auto params = q->parameters();
  for (Tensor& p : params) {
    auto v = p.mutable_values();
    std::fill(v.begin(), v.end(), 0.0);
  }
  // final bias holds the Q row used for every state
  Tensor final_bias = params.back();
  auto v = final_bias.mutable_values();
  for (std::size_t i = 0; i < actions; ++i) v[i] = table[i];
  return q;
}

}  // namespace

TEST_CASE("epsilon greedy") {
  Rng rng(1);
  Tensor q = Tensor::from({1, 3}, {0.1, 0.7, 0.3});
  CHECK(epsilon_greedy(q, 0.0, rng) == 1);

  // ties break to the lowest index
  Tensor tie = Tensor::from({1, 2}, {1.0, 1.0});
  CHECK(epsilon_greedy(tie, 0.0, rng) == 0);

  CHECK_THROWS_AS(epsilon_greedy(q, 1.5, rng), std::domain_error);

  // epsilon = 1: empirical frequencies uniform within 3 sigma over 10k draws
  std::vector<std::size_t> counts(3, 0);
  const std::size_t draws = 10000;
  for (std::size_t i = 0; i < draws; ++i)
    counts[epsilon_greedy(q, 1.0, rng)]++;
  const double p = 1.0 / 3.0;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (std::size_t a = 0; a < 3; ++a)
    CHECK(std::abs(double(counts[a]) - draws * p) < 3.0 * sigma);
}

TEST_CASE("smooth L1 values inside the TD loss") {
  Rng rng(3);
  // Q(s, a) = 0 everywhere; terminal transitions make the target equal r.
  auto q = constant_q(2, 2, {0.0, 0.0}, rng);
  auto qt = q->clone(false);

  // reward 0.5, terminal: TD error 0.5 -> loss 0.5 * 0.5^2 = 0.125
  Transition t1 = make_transition({1, 0}, 0, 0.5, {0, 1}, true);
  CHECK(dqn_loss({&t1}, *q, *qt, 0.99).item() ==
        doctest::Approx(0.125).epsilon(1e-12));

  // reward 2, terminal: |x| = 2 >= 1 -> loss 2 - 0.5 = 1.5
  Transition t2 = make_transition({1, 0}, 0, 2.0, {0, 1}, true);
  CHECK(dqn_loss({&t2}, *q, *qt, 0.99).item() ==
        doctest::Approx(1.5).epsilon(1e-12));

  // zero TD error on a terminal transition with matching Q
  auto q1 = constant_q(2, 2, {1.0, 1.0}, rng);
  auto q1t = q1->clone(false);
  Transition t3 = make_transition({1, 0}, 0, 1.0, {0, 1}, true);
  CHECK(dqn_loss({&t3}, *q1, *q1t, 0.99).item() ==
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(dqn_loss({}, *q, *qt, 0.99), std::logic_error);
}

TEST_CASE("dqn target branch carries no gradient") {
  Rng rng(7);
  auto q = make_approx(ann_value(3, 2), rng);
  DqnConfig cfg;
  cfg.batch_size = 4;
  cfg.target_copy_period = 1000;
  DqnAgent agent(std::move(q), cfg);

  ReplayBuffer buffer(64);
  Rng sampler(11);
  for (int i = 0; i < 32; ++i)
    buffer.push(make_transition(sampler.uniform_vector(3, -1, 1),
                                std::uint32_t(i % 2), sampler.uniform(),
                                sampler.uniform_vector(3, -1, 1), i % 7 == 0));
  agent.update(buffer, sampler);
  for (Tensor& p : agent.q_target().parameters()) {
    CHECK_FALSE(p.requires_grad());
    CHECK_FALSE(p.has_grad());
  }
}

TEST_CASE("soft update") {
  Rng rng(13);
  auto a = make_approx(ann_value(3, 2), rng);
  auto b = make_approx(ann_value(3, 2), rng);

  // tau = 0 leaves the target untouched
  auto before = b->parameters()[0].values()[0];
  soft_update(b->parameters(), a->parameters(), 0.0);
  CHECK(b->parameters()[0].values()[0] == before);

  // tau = 0.5 with hand values
  Tensor t0 = Tensor::from({1}, {0.0});
  Tensor s0 = Tensor::from({1}, {2.0});
  soft_update({t0}, {s0}, 0.5);
  CHECK(t0.values()[0] == doctest::Approx(1.0).epsilon(1e-15));

  // tau = 1 gives a bitwise copy
  soft_update(b->parameters(), a->parameters(), 1.0);
  auto pa = a->parameters();
  auto pb = b->parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    auto va = pa[i].values();
    auto vb = pb[i].values();
    for (std::size_t j = 0; j < va.size(); ++j) CHECK(va[j] == vb[j]);
  }

  auto c = make_approx(ann_value(4, 2), rng);
  CHECK_THROWS_AS(soft_update(c->parameters(), a->parameters(), 0.5),
                  std::logic_error);
}

TEST_CASE("ddpg losses") {
  Rng rng(17);
  ApproxConfig actor_cfg = ann_value(3, 1);
  actor_cfg.head = HeadKind::action;
  actor_cfg.max_action = 2.0;
  auto actor = make_approx(actor_cfg, rng);
  auto actor_t = actor->clone(false);
  auto critic = make_approx(ann_value(4, 1), rng);
  auto critic_t = critic->clone(false);

  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i)
    batch.push_back(make_ctransition(rng.uniform_vector(3, -1, 1),
                                     rng.uniform_vector(1, -2, 2),
                                     rng.uniform(), rng.uniform_vector(3, -1, 1),
                                     false));
  std::vector<const Transition*> view;
  for (auto& t : batch) view.push_back(&t);

  // batch of N identical transitions gives the same loss as a single one
  std::vector<const Transition*> rep(8, view[0]);
  std::vector<const Transition*> one{view[0]};
  auto l_rep = ddpg_losses(rep, *critic, *critic_t, *actor, *actor_t, 0.99);
  auto l_one = ddpg_losses(one, *critic, *critic_t, *actor, *actor_t, 0.99);
  CHECK(l_rep.critic.item() == doctest::Approx(l_one.critic.item()).epsilon(1e-12));
  CHECK(l_rep.actor.item() == doctest::Approx(l_one.actor.item()).epsilon(1e-12));

  // a critic that already matches its target has zero critic loss:
  // terminal transitions with reward equal to Q(s, a)
  auto zero_q = constant_q(3 + 1, 1, {0.0}, rng);
  auto zero_qt = zero_q->clone(false);
  std::vector<Transition> zb;
  for (int i = 0; i < 4; ++i)
    zb.push_back(make_ctransition(rng.uniform_vector(3, -1, 1),
                                  rng.uniform_vector(1, -2, 2), 0.0,
                                  rng.uniform_vector(3, -1, 1), true));
  std::vector<const Transition*> zview;
  for (auto& t : zb) zview.push_back(&t);
  auto lz = ddpg_losses(zview, *zero_q, *zero_qt, *actor, *actor_t, 0.99);
  CHECK(lz.critic.item() == doctest::Approx(0.0).epsilon(1e-12));

  // discrete-style transitions (no action vector) are a contract violation
  Transition bad = make_transition({1, 0, 0}, 0, 0.0, {0, 1, 0}, false);
  CHECK_THROWS(ddpg_losses({&bad}, *critic, *critic_t, *actor, *actor_t,
                           0.99));
}

TEST_CASE("ddpg actor improves against a known quadratic critic") {
  // Critic peaked at action = 0.7 for every state; moving the actor's output
  // toward the peak must lower the actor loss.
  Rng rng(19);
  ApproxConfig actor_cfg = ann_value(1, 1);
  actor_cfg.head = HeadKind::action;
  actor_cfg.max_action = 2.0;
  auto actor = make_approx(actor_cfg, rng);

  // craft a fixed quadratic critic: Q(s, a) = -(a - 0.7)^2 via composition
  struct QuadraticCritic final : Approx {
    ApproxConfig cfg;
    QuadraticCritic() {
      cfg.input_dim = 2;
      cfg.output_dim = 1;
      cfg.hidden = {1};
    }
    Tensor forward(const Tensor& x) override {
      // x = [s, a]; select the action column
      std::vector<std::size_t> cols(x.rows(), 1);
      Tensor a = select_per_row(x, cols);
      return neg(square(sub(a, Tensor::scalar(0.7))));
    }
    std::vector<Tensor> parameters() override { return {}; }
    std::unique_ptr<Approx> clone(bool) const override {
      return std::make_unique<QuadraticCritic>();
    }
    const ApproxConfig& config() const override { return cfg; }
  } critic;

  Tensor states = Tensor::from({16, 1}, Rng(5).uniform_vector(16, -1, 1));
  AdamState opt(actor->parameters(), 1e-2);
  double first = ddpg_actor_loss(states, critic, *actor).item();
  for (int i = 0; i < 200; ++i) {
    opt.zero_grad();
    Tensor loss = ddpg_actor_loss(states, critic, *actor);
    backward(loss);
    opt.step();
  }
  double last = ddpg_actor_loss(states, critic, *actor).item();
  CHECK(last < first);
  // close to the known maximizer
  Tensor out = actor->forward(states);
  for (double a : out.values()) CHECK(std::abs(a - 0.7) < 0.15);
}

TEST_CASE("vae loss components") {
  Rng rng(23);
  VaeConfig vc;
  vc.state_dim = 3;
  vc.action_dim = 1;
  vc.latent_dim = 2;
  vc.hidden = {16, 16};
  vc.max_action = 2.0;
  VaeNetwork vae(vc, rng);

  // analytic KL values
  auto kl = [](double mu, double sigma) {
    return 0.5 * (mu * mu + sigma * sigma - 2.0 * std::log(sigma) - 1.0);
  };
  CHECK(kl(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl(1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

  // loss is finite and positive on random batches, and gradients flow
  Tensor states = Tensor::from({6, 3}, rng.uniform_vector(18, -1, 1));
  Tensor actions = Tensor::from({6, 1}, rng.uniform_vector(6, -2, 2));
  Tensor loss = vae.loss(states, actions, rng);
  CHECK(std::isfinite(loss.item()));
  backward(loss);
  bool any = false;
  for (Tensor& p : vae.parameters())
    for (double g : p.grad()) any = any || g != 0.0;
  CHECK(any);

  // sampled decodes stay within bounds
  Tensor dec = vae.decode_sampled(states, rng);
  for (double a : dec.values()) {
    CHECK(a <= 2.0);
    CHECK(a >= -2.0);
  }
}

TEST_CASE("bcq target properties") {
  Rng rng(29);
  VaeConfig vc;
  vc.state_dim = 2;
  vc.action_dim = 1;
  vc.latent_dim = 2;
  vc.hidden = {12, 12};
  vc.max_action = 1.0;
  VaeNetwork vae(vc, rng);

  Rng net_rng_a(101);
  Rng net_rng_b(101);
  auto critic1 = make_approx(ann_value(3, 1), net_rng_a);
  auto critic2 = make_approx(ann_value(3, 1), net_rng_b);  // identical twin
  ApproxConfig pc = ann_value(3, 1);
  pc.head = HeadKind::action;
  pc.max_action = 1.0;
  auto perturb = make_approx(pc, rng);

  std::vector<Transition> batch;
  for (int i = 0; i < 5; ++i)
    batch.push_back(make_ctransition(rng.uniform_vector(2, -1, 1),
                                     rng.uniform_vector(1, -1, 1),
                                     rng.uniform(), rng.uniform_vector(2, -1, 1),
                                     i == 2));
  std::vector<const Transition*> view;
  for (auto& t : batch) view.push_back(&t);

  // identical critics: the lambda mix is irrelevant, targets bitwise equal
  std::vector<std::vector<double>> targets;
  for (double lam : {0.0, 0.5, 1.0}) {
    Rng r(777);  // same sampling stream for each lambda
    Tensor y = bcq_target(view, vae, *perturb, *critic1, *critic2, 0.99, lam,
                          10, 1.0, r);
    targets.emplace_back(y.values().begin(), y.values().end());
  }
  CHECK(targets[0] == targets[1]);
  CHECK(targets[1] == targets[2]);

  // n_samples = 1: the max over candidates is that candidate's mixed value
  {
    Rng r1(555), r2(555);
    Tensor y1 = bcq_target(view, vae, *perturb, *critic1, *critic2, 0.99, 1.0,
                           1, 1.0, r1);
    Tensor y2 = bcq_target(view, vae, *perturb, *critic1, *critic2, 0.99, 0.0,
                           1, 1.0, r2);
    // with identical critics min == max, so both reduce to the same value
    for (std::size_t i = 0; i < y1.numel(); ++i)
      CHECK(y1.values()[i] == doctest::Approx(y2.values()[i]).epsilon(1e-12));
  }

  // terminal masking: the done row's target equals its reward
  {
    Rng r(321);
    Tensor y = bcq_target(view, vae, *perturb, *critic1, *critic2, 0.99, 0.75,
                          4, 1.0, r);
    CHECK(y.values()[2] == doctest::Approx(batch[2].reward).epsilon(1e-12));
  }

  CHECK_THROWS_AS(bcq_target(view, vae, *perturb, *critic1, *critic2, 0.99,
                             0.75, 0, 1.0, rng),
                  std::logic_error);
}

TEST_CASE("bcq update keeps actions in range and within phi of samples") {
  Rng rng(31);
  VaeConfig vc;
  vc.state_dim = 2;
  vc.action_dim = 1;
  vc.latent_dim = 2;
  vc.hidden = {12, 12};
  vc.max_action = 1.0;

  ApproxConfig cc = ann_value(3, 1);
  ApproxConfig pc = ann_value(3, 1);
  pc.head = HeadKind::action;
  pc.max_action = 1.0;  // phi * max_action

  BcqConfig bcfg;
  bcfg.batch_size = 8;
  bcfg.n_samples = 4;
  bcfg.max_action = 1.0;
  bcfg.learning_rate = 1e-3;
  BcqAgent agent(VaeNetwork(vc, rng), make_approx(cc, rng),
                 make_approx(cc, rng), make_approx(pc, rng), bcfg);

  ReplayBuffer data(256);
  for (int i = 0; i < 128; ++i)
    data.push(make_ctransition(rng.uniform_vector(2, -1, 1),
                               rng.uniform_vector(1, -1, 1), rng.uniform(),
                               rng.uniform_vector(2, -1, 1), i % 11 == 0));
  Rng train_rng(37);
  for (int i = 0; i < 25; ++i) {
    auto losses = agent.update(data, train_rng);
    CHECK(std::isfinite(losses.vae));
    CHECK(std::isfinite(losses.critic));
    CHECK(std::isfinite(losses.perturb));
  }
  CHECK(agent.constraint_violations() == 0);

  Rng act_rng(41);
  for (int i = 0; i < 20; ++i) {
    auto a = agent.act(act_rng.uniform_vector(2, -1, 1), act_rng);
    REQUIRE(a.size() == 1);
    CHECK(a[0] <= 1.0);
    CHECK(a[0] >= -1.0);
  }
  CHECK(agent.constraint_violations() == 0);
}

TEST_CASE("perturbation loss gradient matches finite differences") {
  // frozen synthetic critic, gradient taken through the perturbation net
  Rng rng(43);
  ApproxConfig pc = ann_value(3, 1);
  pc.head = HeadKind::action;
  pc.max_action = 0.5;
  auto perturb = make_approx(pc, rng);

  auto critic = make_approx(ann_value(3, 1), rng);
  auto critic_frozen = critic->clone(false);

  Tensor states = Tensor::from({4, 2}, rng.uniform_vector(8, -1, 1));
  Tensor sampled = Tensor::from({4, 1}, rng.uniform_vector(4, -0.4, 0.4));

  auto loss = [&] {
    Tensor delta = perturb->forward(concat_cols(states, sampled));
    Tensor act = clamp(add(sampled, delta), -1.0, 1.0);
    return neg(mean(critic_frozen->forward(concat_cols(states, act))));
  };
  CHECK(fd_max_rel_err(perturb->parameters(), loss) < 1e-5);
}

TEST_CASE("bc loss values and gradient") {
  Rng rng(47);
  ApproxConfig pc = ann_value(2, 1);
  pc.activation = Activation::tanh;
  auto policy = make_approx(pc, rng);

  // hand value: prediction p, label 0 -> 0.5 p^2 per sample
  std::vector<Transition> batch{
      make_ctransition({0.3, -0.2}, {0.0}, 0.0, {0, 0}, false)};
  std::vector<const Transition*> view{&batch[0]};
  const double pred = policy->forward(pack_state(batch[0].state)).item();
  CHECK(bc_loss(view, *policy).item() ==
        doctest::Approx(0.5 * pred * pred).epsilon(1e-12));

  // a policy that reproduces the labels exactly has zero loss
  std::vector<Transition> fit{make_ctransition({0.3, -0.2}, {pred}, 0.0,
                                               {0, 0}, false)};
  std::vector<const Transition*> fview{&fit[0]};
  CHECK(bc_loss(fview, *policy).item() == doctest::Approx(0.0).epsilon(1e-12));

  // gradient against finite differences on a 2-layer tanh network
  std::vector<Transition> batch2;
  for (int i = 0; i < 6; ++i)
    batch2.push_back(make_ctransition(rng.uniform_vector(2, -1, 1),
                                      rng.uniform_vector(1, -1, 1), 0.0,
                                      {0, 0}, false));
  std::vector<const Transition*> view2;
  for (auto& t : batch2) view2.push_back(&t);
  CHECK(fd_max_rel_err(policy->parameters(), [&] {
    return bc_loss(view2, *policy);
  }) < 1e-6);
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(4);
  for (int i = 0; i < 6; ++i) {
    Transition t;
    t.state = {double(i)};
    t.next_state = {double(i)};
    buf.push(std::move(t));
  }
  // oldest entries evicted first: 0 and 1 are gone
  CHECK(buf.size() == 4);
  for (std::size_t i = 0; i < buf.size(); ++i)
    CHECK(buf.at(i).state[0] >= 2.0);

  // reproducible sampling
  Rng r1(5), r2(5);
  auto s1 = buf.sample(8, r1);
  auto s2 = buf.sample(8, r2);
  for (std::size_t i = 0; i < s1.size(); ++i)
    CHECK(s1[i]->state[0] == s2[i]->state[0]);

  ReplayBuffer empty(4);
  Rng r3(1);
  CHECK_THROWS_AS(empty.sample(2, r3), std::logic_error);
}

TEST_CASE("spiking and conventional variants expose identical shapes") {
  Rng rng(53);
  for (std::size_t in : {3ul, 5ul}) {
    for (std::size_t out : {1ul, 2ul}) {
      auto ann = make_approx(ann_value(in, out), rng);
      auto snn = make_approx(spiking_value(in, out), rng);
      Tensor x = Tensor::from({7, in}, rng.uniform_vector(7 * in, -1, 1));
      Tensor ya = ann->forward(x);
      Tensor ys = snn->forward(x);
      CHECK(ya.shape() == ys.shape());

      // action heads agree on shape and bounds too
      ApproxConfig ac = ann_value(in, out);
      ac.head = HeadKind::action;
      ac.max_action = 2.0;
      ApproxConfig sc = spiking_value(in, out);
      sc.head = HeadKind::action;
      sc.max_action = 2.0;
      auto ann_a = make_approx(ac, rng);
      auto snn_a = make_approx(sc, rng);
      Tensor yaa = ann_a->forward(x);
      Tensor ysa = snn_a->forward(x);
      CHECK(yaa.shape() == ysa.shape());
      for (double v : ysa.values()) {
        CHECK(v <= 2.0);
        CHECK(v >= -2.0);
      }
    }
  }

  // rate and accumulate coder variants preserve shapes as well
  Rng rng2(59);
  for (CoderKind kind : {CoderKind::rate, CoderKind::accumulate}) {
    ApproxConfig sc = spiking_value(4, 2);
    sc.coder = kind;
    auto net = make_approx(sc, rng2);
    Tensor x = Tensor::from({3, 4}, rng2.uniform_vector(12, -1, 1));
    CHECK(net->forward(x).shape() == Shape{3, 2});
  }
}

TEST_CASE("adaptive ann variant carries trainable coder weights") {
  Rng rng(61);
  ApproxConfig c = ann_value(3, 2);
  c.coder = CoderKind::adaptive;
  auto net = make_approx(c, rng);
  // mlp params + w_e + w_d
  auto params = net->parameters();
  REQUIRE(params.size() >= 2);
  Tensor w_d = params.back();
  Tensor w_e = params[params.size() - 2];
  CHECK(w_e.numel() == 4);
  CHECK(w_d.numel() == 4);
  CHECK(w_e.requires_grad());

  Tensor x = Tensor::from({2, 3}, rng.uniform_vector(6, -1, 1));
  backward(sum(net->forward(x)));
  bool any = false;
  for (double g : w_d.grad()) any = any || g != 0.0;
  CHECK(any);
}
