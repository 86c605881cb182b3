#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "orl/envs.hpp"
#include "orl/offline.hpp"

using namespace orl;

TEST_CASE("epsilon zero logs only expert actions") {
  GridWorldSpec g = grid5_default();
  g.slip_prob = 0.0;
  const DiscreteMdp m = build_gridworld(g);
  const std::vector<int> expert = make_expert(m);
  Rng rng(8);
  const Dataset data = collect_dataset(m, expert, 0.0, 500, rng, "grid5");
  REQUIRE(data.transitions.size() == 500);
  for (const Transition& t : data.transitions)
    CHECK(t.ai() == expert[t.si()]);
}

TEST_CASE("epsilon one is uniform over actions") {
  const EnvBundle env = make_env("grid5");
  Rng rng(12);
  const Dataset data =
      collect_dataset(env.mdp, env.expert, 1.0, 10000, rng, "grid5");
  std::vector<long> counts(4, 0);
  for (const Transition& t : data.transitions) ++counts[t.ai()];
  // binomial 3-sigma band around p = 1/4
  const double sigma = std::sqrt(10000 * 0.25 * 0.75);
  for (long c : counts) CHECK(std::abs(c - 2500.0) <= 3.0 * sigma);
}

TEST_CASE("dataset length is exact") {
  const EnvBundle env = make_env("queue2");
  Rng rng(1);
  CHECK(collect_dataset(env.mdp, env.expert, 0.2, 7, rng).transitions.size() ==
        7);
  Rng rng2(1);
  const EnvBundle pm = make_env("pointmass");
  CHECK(collect_dataset(pm.pm, pm.expert_gain, 0.2, 7, rng2)
            .transitions.size() == 7);
}

namespace {

DiscreteMdp tiny_mdp() {
  DiscreteMdp m = DiscreteMdp::empty(2, 2);
  m.gamma = 0.8;
  m.horizon = 20;
  m.trans[0][0] = {{0, 1.0}};
  m.trans[0][1] = {{1, 1.0}};
  m.trans[1][0] = {{0, 1.0}};
  m.trans[1][1] = {{1, 1.0}};
  m.reward = {0.0, 0.1, 0.5, 1.0};
  m.initial = {0.5, 0.5};
  m.validate();
  return m;
}

Dataset full_coverage_dataset(const DiscreteMdp& m, long steps, Rng& rng) {
  Dataset data;
  for (long i = 0; i < steps; ++i) {
    const int s = rng.uniform_int(m.n_states);
    const int a = rng.uniform_int(m.n_actions);
    const StepResult r = env_step(m, s, a, rng);
    data.transitions.push_back(Transition::discrete(s, a, r.reward, r.next, r.done));
  }
  return data;
}

}  // namespace

TEST_CASE("lambda zero training recovers optimal q on full coverage") {
  const DiscreteMdp m = tiny_mdp();
  Rng rng(21);
  const Dataset data = full_coverage_dataset(m, 2000, rng);
  OfflineConfig cfg;
  cfg.lambda = 0.0;
  // enough epochs for the periodically refreshed bootstrap target to reach
  // its fixed point (the contraction acts once per refresh)
  cfg.epochs = 250;
  cfg.lr = 0.05;
  cfg.gamma = m.gamma;
  cfg.seed = 5;
  const DiscreteQ q = train_offline_discrete(data, cfg, 2, 2);
  const TabularQ qstar = solve_optimal_q(m);
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      CHECK(std::abs(q.q_row(s)[a] - qstar.at(s, a)) < 0.05);
}

TEST_CASE("large lambda depresses unseen actions") {
  const DiscreteMdp m = tiny_mdp();
  Rng rng(4);
  Dataset data = full_coverage_dataset(m, 2000, rng);
  // knock out action 1 at state 0
  std::erase_if(data.transitions,
                [](const Transition& t) { return t.si() == 0 && t.ai() == 1; });
  OfflineConfig cfg;
  cfg.lambda = 100.0;
  cfg.gamma = m.gamma;
  cfg.lr = 0.05;
  cfg.seed = 5;
  const DiscreteQ q100 = train_offline_discrete(data, cfg, 2, 2);
  CHECK(q100.q_row(0)[1] < q100.q_row(0)[0]);
  // conservatism ordering against the unpenalized model
  cfg.lambda = 0.0;
  const DiscreteQ q0 = train_offline_discrete(data, cfg, 2, 2);
  CHECK(q100.q_row(0)[1] <= q0.q_row(0)[1]);
}

TEST_CASE("empty dataset is rejected") {
  OfflineConfig cfg;
  CHECK_THROWS(train_offline_discrete(Dataset{}, cfg, 2, 2));
  PointMassSpec pm;
  CHECK_THROWS(train_offline_continuous(Dataset{}, cfg, pm));
}

TEST_CASE("continuous action datasets are rejected by the discrete trainer") {
  const EnvBundle env = make_env("pointmass");
  Rng rng(2);
  const Dataset data = collect_dataset(env.pm, env.expert_gain, 0.2, 50, rng);
  OfflineConfig cfg;
  CHECK_THROWS(train_offline_discrete(data, cfg, 2, 2));
}

TEST_CASE("huge bc weight clones the behavior policy") {
  const EnvBundle env = make_env("pointmass");
  Rng rng(3);
  const Dataset data = collect_dataset(env.pm, env.expert_gain, 0.0, 2000, rng);
  OfflineConfig cfg;
  cfg.lambda = 1000.0;
  cfg.epochs = 30;
  cfg.lr = 1e-3;
  cfg.gamma = env.pm.gamma;
  cfg.seed = 9;
  const ActorCritic ac = train_offline_continuous(data, cfg, env.pm);
  double mse = 0.0;
  for (const Transition& t : data.transitions) {
    const double a = ac.actor.forward({t.s[0], t.s[1]})[0];
    mse += (a - t.a[0]) * (a - t.a[0]);
  }
  mse /= data.transitions.size();
  CHECK(mse < 0.01);
}

TEST_CASE("one transition and one epoch stays finite") {
  const EnvBundle env = make_env("pointmass");
  Rng rng(6);
  const Dataset data = collect_dataset(env.pm, env.expert_gain, 0.2, 1, rng);
  OfflineConfig cfg;
  cfg.epochs = 1;
  cfg.minibatch = 1;
  cfg.gamma = env.pm.gamma;
  const ActorCritic ac = train_offline_continuous(data, cfg, env.pm);
  for (double p : ac.actor.params()) REQUIRE(std::isfinite(p));
  for (double p : ac.critic.params()) REQUIRE(std::isfinite(p));
}

TEST_CASE("training reduces the dataset bellman residual") {
  const EnvBundle env = make_env("grid5");
  Rng rng(13);
  const Dataset data = collect_dataset(env.mdp, env.expert, 0.2, 5000, rng);
  OfflineConfig cfg;
  cfg.gamma = env.mdp.gamma;
  cfg.seed = 3;
  const DiscreteQ init = DiscreteQ::tabular(env.mdp.n_states, env.mdp.n_actions);
  const DiscreteQ trained =
      train_offline_discrete(data, cfg, env.mdp.n_states, env.mdp.n_actions);
  CHECK(dataset_bellman_residual(trained, data, cfg.gamma) <
        dataset_bellman_residual(init, data, cfg.gamma));
}

TEST_CASE("loss gradients agree with finite differences") {
  const DiscreteMdp m = tiny_mdp();
  Rng rng(33);
  const Dataset data = full_coverage_dataset(m, 32, rng);
  std::vector<const Transition*> batch;
  for (const Transition& t : data.transitions) batch.push_back(&t);

  for (int point = 0; point < 3; ++point) {
    DiscreteQ q = DiscreteQ::tabular(2, 2);
    for (double& v : q.params()) v = rng.uniform(-1.0, 1.0);
    const DiscreteQ target = q;
    std::vector<double> grad(q.params().size(), 0.0);
    bellman_cql_loss(q, target, batch, m.gamma, 2.5, &grad);
    auto loss = [&] { return bellman_cql_loss(q, target, batch, m.gamma, 2.5, nullptr); };
    CHECK(finite_diff_check(q.params(), loss, grad, 1e-5, 1e-4).pass);
  }
  // net-backed q path as well
  for (int point = 0; point < 3; ++point) {
    DiscreteQ q = DiscreteQ::mlp(2, 2, {8}, rng);
    const DiscreteQ target = q;
    std::vector<double> grad(q.params().size(), 0.0);
    bellman_cql_loss(q, target, batch, m.gamma, 1.0, &grad);
    auto loss = [&] { return bellman_cql_loss(q, target, batch, m.gamma, 1.0, nullptr); };
    CHECK(finite_diff_check(q.params(), loss, grad, 1e-5, 1e-4).pass);
  }
}

TEST_CASE("candidate sets track the lambda grid") {
  const EnvBundle env = make_env("grid5");
  OfflineConfig cfg;
  cfg.epochs = 2;  // cheap smoke settings
  Rng rng(5);
  const Dataset data = collect_dataset(env.mdp, env.expert, 0.2, 500, rng);
  const CandidateSet five =
      build_candidates(env, {0, 1, 5, 10, 100}, data, cfg, 77);
  CHECK(five.size() == 5);
  CHECK(five.lambdas == std::vector<double>{0, 1, 5, 10, 100});
  const CandidateSet one = build_candidates(env, {1}, data, cfg, 77);
  CHECK(one.size() == 1);
}

TEST_CASE("same master seed reproduces candidates bit for bit") {
  const EnvBundle env = make_env("grid5");
  OfflineConfig cfg;
  cfg.epochs = 3;
  Rng ra(5), rb(5);
  const Dataset da = collect_dataset(env.mdp, env.expert, 0.2, 500, ra);
  const Dataset db = collect_dataset(env.mdp, env.expert, 0.2, 500, rb);
  const CandidateSet a = build_candidates(env, {0, 5}, da, cfg, 123);
  const CandidateSet b = build_candidates(env, {0, 5}, db, cfg, 123);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a.q[i].params() == b.q[i].params());
}
