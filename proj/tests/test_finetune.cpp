#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "orl/envs.hpp"
#include "orl/finetune.hpp"

using namespace orl;

namespace {

// Tabular model whose greedy policy equals the given action table.
DiscreteQ model_from_policy(const DiscreteMdp& m, const std::vector<int>& pi) {
  DiscreteQ q = DiscreteQ::tabular(m.n_states, m.n_actions);
  for (int s = 0; s < m.n_states; ++s) q.table.at(s, pi[s]) = 1.0;
  return q;
}

}  // namespace

TEST_CASE("no overrides when the model agrees with the expert") {
  const EnvBundle env = make_env("grid5");
  const DiscreteQ model = model_from_policy(env.mdp, env.expert);
  Rng rng(3);
  const auto [log, overrides] =
      deploy_with_overrides(model, env.expert, env.mdp, env.score, rng);
  CHECK(log.disagreements == 0);
  CHECK(overrides.transitions.empty());
}

TEST_CASE("single deviation logs one expert decision") {
  GridWorldSpec g = grid5_default();
  g.slip_prob = 0.0;
  const DiscreteMdp m = build_gridworld(g);
  const std::vector<int> expert =
      make_expert(m, entry_shaping(m, gridworld_hazard_mask(g), -10.0));
  // deterministic expert path from the start
  std::vector<int> path{grid_state(g, g.start_x, g.start_y)};
  while (!m.terminal[path.back()])
    path.push_back(m.trans[path.back()][expert[path.back()]].front().next);
  const int dev = path[path.size() / 2];
  std::vector<int> pi = expert;
  pi[dev] = (expert[dev] + 1) % m.n_actions;
  const DiscreteQ model = model_from_policy(m, pi);
  Rng rng(1);
  const ScoreParams params{1.0, 0.1, 0.0, g.horizon};
  const auto [log, overrides] =
      deploy_with_overrides(model, expert, m, params, rng);
  // the expert's action is executed, so the trajectory stays on the expert
  // path and the deviating state is visited exactly once
  REQUIRE(overrides.transitions.size() == 1);
  CHECK(overrides.transitions.front().si() == dev);
  CHECK(overrides.transitions.front().ai() == expert[dev]);
  CHECK(log.disagreements == 1);
}

TEST_CASE("continuous trigger fires every step when far from the expert") {
  PointMassSpec pm;
  Rng init(2);
  ActorCritic model = ActorCritic::make(2, 1, {8}, 1.0, init);
  for (double& p : model.actor.params()) p = 0.0;  // constant action 0
  const ContinuousPolicyFn expert = [](const Vec2&) { return 0.5; };
  const ScoreParams params{0.01, 0.01, 0.09, pm.horizon};
  Rng rng(4);
  const auto [log, overrides] =
      deploy_with_overrides(model, expert, pm, params, 0.09, rng);
  CHECK(log.disagreements == log.steps);  // 0.5^2 = 0.25 > 0.09
  CHECK(overrides.transitions.size() == static_cast<std::size_t>(pm.horizon));
  for (const Transition& t : overrides.transitions) CHECK(t.a[0] == 0.5);
}

TEST_CASE("margin loss hand values") {
  CHECK(margin_loss(std::vector<double>{3.0, 1.0}, 0, 1.0) == 0.0);
  CHECK(margin_loss(std::vector<double>{1.0, 2.0}, 0, 1.0) == 2.0);
  CHECK(margin_loss(std::vector<double>{2.0, 2.0}, 1, 0.5) == 0.5);
}

TEST_CASE("margin descent flips the argmax to the expert action") {
  DiscreteQ q = DiscreteQ::tabular(1, 2);
  q.table.at(0, 0) = 1.0;
  q.table.at(0, 1) = 2.0;
  OverrideDataset log;
  // terminal transition whose reward matches Q(s, a): Bellman term is zero
  log.transitions.push_back(Transition::discrete(0, 0, 1.0, 0, true));
  FinetuneConfig cfg;
  cfg.epochs = 400;
  cfg.lr = 0.05;
  Rng rng(1);
  finetune_discrete(q, log, cfg, rng);
  CHECK(q.greedy()[0] == 0);
  CHECK(margin_loss(q.q_row(0), 0, cfg.delta) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("zero loss leaves parameters untouched") {
  DiscreteQ q = DiscreteQ::tabular(1, 2);
  q.table.at(0, 0) = 2.0;  // dominates by delta = 1
  q.table.at(0, 1) = 0.5;
  OverrideDataset log;
  log.transitions.push_back(Transition::discrete(0, 0, 2.0, 0, true));
  const std::vector<double> before = q.params();
  FinetuneConfig cfg;
  Rng rng(1);
  finetune_discrete(q, log, cfg, rng);
  CHECK(q.params() == before);
}

TEST_CASE("empty override log is rejected") {
  DiscreteQ q = DiscreteQ::tabular(1, 2);
  FinetuneConfig cfg;
  Rng rng(1);
  CHECK_THROWS(finetune_discrete(q, OverrideDataset{}, cfg, rng));
  Rng init(2);
  ActorCritic ac = ActorCritic::make(2, 1, {8}, 1.0, init);
  CHECK_THROWS(finetune_critic_continuous(ac, OverrideDataset{}, cfg, rng));
  CHECK_THROWS(finetune_actor_continuous(ac, OverrideDataset{}, cfg, rng));
}

TEST_CASE("critic fits a one-sample bellman fixed point") {
  Rng init(6);
  ActorCritic ac = ActorCritic::make(2, 1, {16}, 1.0, init);
  OverrideDataset log;
  Transition t;
  t.s = {0.2, -0.1};
  t.a = {0.5};
  t.r = 1.0;
  t.sp = {0.0, 0.0};
  t.done = true;  // terminal: target is the plain reward
  log.transitions.push_back(t);
  FinetuneConfig cfg;
  cfg.epochs = 3000;
  cfg.lr = 1e-2;
  Rng rng(3);
  finetune_critic_continuous(ac, log, cfg, rng);
  CHECK(std::abs(ac.critic.forward({0.2, -0.1, 0.5})[0] - 1.0) < 0.05);
}

TEST_CASE("zero learning rate is a no-op") {
  Rng init(6);
  ActorCritic ac = ActorCritic::make(2, 1, {8}, 1.0, init);
  OverrideDataset log;
  Transition t;
  t.s = {0.2, -0.1};
  t.a = {0.5};
  t.r = 1.0;
  t.sp = {0.1, 0.0};
  log.transitions.push_back(t);
  FinetuneConfig cfg;
  cfg.lr = 0.0;
  const std::vector<double> critic_before = ac.critic.params();
  const std::vector<double> actor_before = ac.actor.params();
  Rng rng(3);
  finetune_critic_continuous(ac, log, cfg, rng);
  finetune_actor_continuous(ac, log, cfg, rng);
  CHECK(ac.critic.params() == critic_before);
  CHECK(ac.actor.params() == actor_before);
}

TEST_CASE("constant critic reduces the actor update to behavior cloning") {
  Rng init(8);
  ActorCritic ac = ActorCritic::make(2, 1, {16}, 1.0, init);
  for (double& p : ac.critic.params()) p = 0.0;  // constant critic
  OverrideDataset log;
  Rng data_rng(5);
  for (int i = 0; i < 16; ++i) {
    Transition t;
    t.s = {data_rng.uniform(-1.0, 1.0), data_rng.uniform(-0.5, 0.5)};
    t.a = {0.3 * t.s[0] - 0.2 * t.s[1]};
    t.r = 0.0;
    t.sp = t.s;
    log.transitions.push_back(t);
  }
  FinetuneConfig cfg;
  cfg.epochs = 3000;
  cfg.lr = 1e-2;
  Rng rng(3);
  finetune_actor_continuous(ac, log, cfg, rng);
  double mse = 0.0;
  for (const Transition& t : log.transitions) {
    const double a = ac.actor.forward({t.s[0], t.s[1]})[0];
    mse += (a - t.a[0]) * (a - t.a[0]);
  }
  mse /= log.transitions.size();
  CHECK(mse < 0.01);
}

TEST_CASE("actor settles between critic peak and expert action") {
  // critic regressed to Q(s, a) = -(a - 0.4)^2; expert action 0.8 at one
  // state; the 1:1 weighted objective is stationary at a = 0.6
  Rng init(9);
  ActorCritic ac = ActorCritic::make(2, 1, {32, 32}, 1.0, init);
  const Vec2 s{0.2, -0.1};
  {
    OptimState opt;
    opt.lr = 1e-2;
    Rng rng(2);
    for (int step = 0; step < 6000; ++step) {
      const double a = rng.uniform(-1.0, 1.0);
      Mlp::Cache cache;
      const double out = ac.critic.forward({s[0], s[1], a}, &cache)[0];
      const double target = -(a - 0.4) * (a - 0.4);
      std::vector<double> grad(ac.critic.params().size(), 0.0);
      ac.critic.backward(cache, std::vector<double>{out - target}, grad);
      opt_step(ac.critic.params(), grad, opt);
    }
  }
  OverrideDataset log;
  Transition t;
  t.s = {s[0], s[1]};
  t.a = {0.8};
  t.r = 0.0;
  t.sp = {s[0], s[1]};
  log.transitions.push_back(t);
  FinetuneConfig cfg;
  cfg.epochs = 4000;
  cfg.lr = 1e-2;
  Rng rng(3);
  finetune_actor_continuous(ac, log, cfg, rng);
  CHECK(ac.actor.forward({s[0], s[1]})[0] == doctest::Approx(0.6).epsilon(0.15));
}

TEST_CASE("finetuning trace is reproducible and internally consistent") {
  const EnvBundle env = make_env("grid5");
  const std::vector<int> unshaped = make_expert(env.mdp);
  auto run = [&] {
    DiscreteQ model = model_from_policy(env.mdp, unshaped);
    FinetuneConfig cfg;
    cfg.iterations = 15;
    cfg.gamma = env.mdp.gamma;
    Rng rng(7);
    return run_finetuning(model, env.expert, env.mdp, env.score, cfg, rng);
  };
  const FinetuneTrace a = run(), b = run();
  CHECK(a.score == b.score);
  CHECK(a.disagreements == b.disagreements);
  for (std::size_t k = 0; k < a.score.size(); ++k)
    CHECK(a.disagreements[k] == a.overrides[k]);
}
