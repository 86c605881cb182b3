#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "orl/envs.hpp"
#include "orl/scoring.hpp"

using namespace orl;

TEST_CASE("online score reproduces published rows") {
  ScoreParams p;
  p.alpha2 = 1.0 / 1000.0;
  p.alpha1 = 1.0 / 8500.0;
  CHECK(std::abs(online_score(8292.0, 59, p) - 0.92) <= 0.005);
  p.alpha1 = 1.0 / 4000.0;
  CHECK(std::abs(online_score(4106.0, 328, p) - 0.70) <= 0.005);
  p.alpha1 = 1.0 / 3500.0;
  CHECK(std::abs(online_score(3387.0, 193, p) - 0.77) <= 0.005);
  CHECK(online_score(0.0, 0, p) == 0.0);
  CHECK_THROWS(online_score(1.0, -1, p));
}

TEST_CASE("score invariance under rescaling of return and alpha1") {
  ScoreParams a, b;
  a.alpha1 = 0.25;
  b.alpha1 = 0.05;
  a.alpha2 = b.alpha2 = 0.01;
  // alpha1 * R held fixed: 0.25 * 12 == 0.05 * 60
  CHECK(online_score(12.0, 7, a) == online_score(60.0, 7, b));
}

TEST_CASE("expert policy rollout has zero disagreements") {
  const EnvBundle env = make_env("grid5");
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const EpisodeLog log =
        rollout_episode(env.expert, env.expert, env.mdp, env.score, rng);
    CHECK(log.disagreements == 0);
    CHECK(log.score == doctest::Approx(env.score.alpha1 * log.env_return));
  }
}

TEST_CASE("single planted deviation counts once") {
  GridWorldSpec g = grid5_default();
  g.slip_prob = 0.0;
  const DiscreteMdp m = build_gridworld(g);
  const std::vector<int> expert =
      make_expert(m, entry_shaping(m, gridworld_hazard_mask(g), -10.0));
  const int s0 = grid_state(g, g.start_x, g.start_y);
  std::vector<int> path{s0};
  {
    int s = s0;
    while (!m.terminal[s]) {
      s = m.trans[s][expert[s]].front().next;
      path.push_back(s);
    }
  }
  REQUIRE(path.size() >= 3);
  // the policy follows the expert's deterministic path; a supervisor that
  // differs at exactly one visited state flags exactly one disagreement
  const std::vector<int>& policy = expert;
  std::vector<int> supervisor = expert;
  const int dev_state = path[path.size() / 2];
  supervisor[dev_state] = (expert[dev_state] + 1) % m.n_actions;
  Rng rng(1);
  const ScoreParams params{1.0, 0.1, 0.0, g.horizon};
  const EpisodeLog log = rollout_episode(policy, supervisor, m, params, rng);
  CHECK(log.disagreements == 1);
}

TEST_CASE("continuous disagreement indicator arithmetic") {
  PointMassSpec pm;
  pm.noise_std = 0.0;
  ScoreParams params{1.0, 1.0, 0.09, pm.horizon};
  const ContinuousPolicyFn expert = [](const Vec2&) { return 0.5; };
  Rng rng(9);
  const EpisodeLog at_tol = rollout_episode(
      [](const Vec2&) { return 0.2; }, expert, pm, params, rng);
  CHECK(at_tol.disagreements == 0);  // 0.3^2 = 0.09 is not > tau
  const EpisodeLog beyond = rollout_episode(
      [](const Vec2&) { return 0.1; }, expert, pm, params, rng);
  CHECK(beyond.disagreements == beyond.steps);  // 0.4^2 = 0.16 > tau
  CHECK(beyond.steps == pm.horizon);
}

TEST_CASE("exact score on a deterministic chain equals the rollout") {
  GridWorldSpec g = grid5_default();
  g.slip_prob = 0.0;
  const DiscreteMdp m = build_gridworld(g);
  const std::vector<int> expert =
      make_expert(m, entry_shaping(m, gridworld_hazard_mask(g), -10.0));
  const std::vector<int> policy = make_expert(m);
  const ScoreParams params{1.0, 0.1, 0.0, g.horizon};
  Rng rng(2);
  const EpisodeLog log = rollout_episode(policy, expert, m, params, rng);
  const ExpectedScore exact = expected_score_exact(m, policy, expert, params);
  CHECK(exact.exact);
  CHECK(exact.value == doctest::Approx(log.score).epsilon(1e-12));
}

namespace {

// Hand-buildable stochastic 2-state MDP for brute-force enumeration.
DiscreteMdp two_state() {
  DiscreteMdp m = DiscreteMdp::empty(2, 2);
  m.gamma = 0.9;
  m.horizon = 3;
  m.trans[0][0] = {{0, 0.7}, {1, 0.3}};
  m.trans[0][1] = {{1, 1.0}};
  m.trans[1][0] = {{0, 0.4}, {1, 0.6}};
  m.trans[1][1] = {{0, 1.0}};
  m.reward = {0.1, -0.2, 0.5, 0.3};
  m.initial = {0.6, 0.4};
  m.validate();
  return m;
}

double enumerate_expected_score(const DiscreteMdp& m,
                                const std::vector<int>& pi,
                                const std::vector<int>& ex,
                                const ScoreParams& p) {
  double total = 0.0;
  // enumerate state sequences s_0..s_T
  std::vector<int> seq(p.horizon + 1);
  std::function<void(int, double)> rec = [&](int t, double prob) {
    if (t == p.horizon) {
      double score = 0.0;
      for (int u = 0; u < p.horizon; ++u) {
        score += p.alpha1 * m.r(seq[u], pi[seq[u]]);
        if (pi[seq[u]] != ex[seq[u]]) score -= p.alpha2;
      }
      total += prob * score;
      return;
    }
    for (const Outcome& o : m.trans[seq[t]][pi[seq[t]]]) {
      seq[t + 1] = o.next;
      rec(t + 1, prob * o.prob);
    }
  };
  for (int s0 = 0; s0 < m.n_states; ++s0) {
    if (m.initial[s0] == 0.0) continue;
    seq[0] = s0;
    rec(0, m.initial[s0]);
  }
  return total;
}

}  // namespace

TEST_CASE("dp oracle equals brute-force enumeration") {
  const DiscreteMdp m = two_state();
  const ScoreParams p{0.8, 0.3, 0.0, 3};
  const std::vector<int> pi{0, 1}, ex{1, 1};
  const ExpectedScore dp = expected_score_exact(m, pi, ex, p);
  const double brute = enumerate_expected_score(m, pi, ex, p);
  CHECK(dp.value == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("dp oracle handles terminal absorption") {
  DiscreteMdp m = two_state();
  m.terminal[1] = 1;
  m.validate();
  const ScoreParams p{1.0, 0.5, 0.0, 3};
  const std::vector<int> pi{0, 0}, ex{1, 0};
  // brute force with early termination on entering state 1
  double total = 0.0;
  std::function<void(int, int, double, double)> rec =
      [&](int s, int t, double prob, double score) {
        if (t == p.horizon || m.terminal[s]) {
          total += prob * score;
          return;
        }
        const double step =
            p.alpha1 * m.r(s, pi[s]) - (pi[s] != ex[s] ? p.alpha2 : 0.0);
        for (const Outcome& o : m.trans[s][pi[s]])
          rec(o.next, t + 1, prob * o.prob, score + step);
      };
  rec(0, 0, 1.0, 0.0);
  m.initial = {1.0, 0.0};
  const ExpectedScore dp = expected_score_exact(m, pi, ex, p);
  CHECK(dp.value == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("monte carlo agrees with dp on grid5") {
  const EnvBundle env = make_env("grid5");
  const std::vector<int> policy = make_expert(env.mdp);  // unshaped optimum
  const ExpectedScore dp =
      expected_score_exact(env.mdp, policy, env.expert, env.score);
  for (long n : {1000L, 10000L, 100000L}) {
    Rng rng(31 + n);
    const ExpectedScore mc =
        expected_score_mc(env.mdp, policy, env.expert, env.score, n, rng);
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.value - dp.value) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("score bound and log consistency hold on rollouts") {
  const EnvBundle env = make_env("queue2");
  double r_max = 0.0;
  for (double r : env.mdp.reward) r_max = std::max(r_max, std::abs(r));
  const double bound = env.score.alpha1 * env.score.horizon * r_max +
                       env.score.alpha2 * env.score.horizon;
  Rng rng(17);
  const std::vector<int> policy = make_expert(env.mdp);
  for (int i = 0; i < 10; ++i) {
    const EpisodeLog log =
        rollout_episode(policy, env.expert, env.mdp, env.score, rng);
    CHECK(std::abs(log.score) <= bound);
    CHECK(log.disagreements >= 0);
    CHECK(log.disagreements <= log.steps);
    CHECK(log.steps <= env.score.horizon);
    CHECK(log.score ==
          doctest::Approx(online_score(log.env_return, log.disagreements,
                                       env.score)).epsilon(1e-15));
  }
}
