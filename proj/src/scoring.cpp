#include "orl/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace orl {

Transition Transition::discrete(int s, int a, double r, int sp, bool done) {
  Transition t;
  t.s = {static_cast<double>(s)};
  t.a = {static_cast<double>(a)};
  t.r = r;
  t.sp = {static_cast<double>(sp)};
  t.done = done;
  return t;
}

double online_score(double env_return, int disagreements,
                    const ScoreParams& params) {
  if (disagreements < 0)
    throw std::invalid_argument("online_score: negative disagreement count");
  return params.alpha1 * env_return - params.alpha2 * disagreements;
}

EpisodeLog rollout_episode(const std::vector<int>& policy,
                           const std::vector<int>& expert,
                           const DiscreteMdp& mdp, const ScoreParams& params,
                           Rng& rng, bool log_transitions) {
  EpisodeLog log;
  int s = env_reset(mdp, rng);
  for (int t = 0; t < params.horizon; ++t) {
    const int a = policy[s];
    if (a != expert[s]) ++log.disagreements;
    const StepResult step = env_step(mdp, s, a, rng);
    log.env_return += step.reward;
    ++log.steps;
    if (log_transitions)
      log.transitions.push_back(Transition::discrete(s, a, step.reward, step.next, step.done));
    s = step.next;
    if (step.done) break;
  }
  log.score = online_score(log.env_return, log.disagreements, params);
  return log;
}

EpisodeLog rollout_episode(const ContinuousPolicyFn& policy,
                           const ContinuousPolicyFn& expert,
                           const PointMassSpec& pm, const ScoreParams& params,
                           Rng& rng, bool log_transitions) {
  EpisodeLog log;
  Vec2 s = pm_reset(pm, rng);
  for (int t = 0; t < params.horizon; ++t) {
    const double a = pm_clip(pm, policy(s));
    const double ae = expert(s);
    const double d = a - ae;
    if (d * d > params.tau) ++log.disagreements;
    const PmStep step = pm_step(pm, s, a, rng);
    log.env_return += step.reward;
    ++log.steps;
    if (log_transitions) {
      Transition tr;
      tr.s = {s[0], s[1]};
      tr.a = {a};
      tr.r = step.reward;
      tr.sp = {step.next[0], step.next[1]};
      tr.done = false;
      log.transitions.push_back(std::move(tr));
    }
    s = step.next;
  }
  log.score = online_score(log.env_return, log.disagreements, params);
  return log;
}

ExpectedScore expected_score_exact(const DiscreteMdp& mdp,
                                   const std::vector<int>& policy,
                                   const std::vector<int>& expert,
                                   const ScoreParams& params) {
  if (static_cast<int>(policy.size()) != mdp.n_states ||
      static_cast<int>(expert.size()) != mdp.n_states)
    throw std::invalid_argument("expected_score_exact: policy size mismatch");
  // Alive mass only; mass entering a terminal state stops accumulating.
  std::vector<double> dist = mdp.initial;
  for (int s = 0; s < mdp.n_states; ++s)
    if (mdp.terminal[s] && dist[s] != 0.0)
      throw std::invalid_argument("expected_score_exact: initial mass on terminal state");
  double value = 0.0;
  std::vector<double> next(mdp.n_states);
  for (int t = 0; t < params.horizon; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
      const double mass = dist[s];
      if (mass == 0.0) continue;
      const int a = policy[s];
      value += mass * (params.alpha1 * mdp.r(s, a) -
                       params.alpha2 * (a != expert[s] ? 1.0 : 0.0));
      for (const Outcome& o : mdp.trans[s][a])
        if (!mdp.terminal[o.next]) next[o.next] += mass * o.prob;
    }
    dist.swap(next);
  }
  ExpectedScore out;
  out.value = value;
  out.exact = true;
  return out;
}

namespace {

template <typename RolloutFn>
ExpectedScore mc_mean(long episodes, RolloutFn&& roll) {
  if (episodes < 1)
    throw std::invalid_argument("expected_score_mc: need >= 1 episode");
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < episodes; ++i) {
    const double s = roll();
    sum += s;
    sumsq += s * s;
  }
  ExpectedScore out;
  out.episodes = episodes;
  out.value = sum / episodes;
  const double var =
      episodes > 1 ? (sumsq - sum * sum / episodes) / (episodes - 1) : 0.0;
  out.std_error = std::sqrt(std::max(0.0, var) / episodes);
  return out;
}

}  // namespace

ExpectedScore expected_score_mc(const DiscreteMdp& mdp,
                                const std::vector<int>& policy,
                                const std::vector<int>& expert,
                                const ScoreParams& params, long episodes,
                                Rng& rng) {
  return mc_mean(episodes, [&] {
    return rollout_episode(policy, expert, mdp, params, rng).score;
  });
}

ExpectedScore expected_score_mc(const PointMassSpec& pm,
                                const ContinuousPolicyFn& policy,
                                const ContinuousPolicyFn& expert,
                                const ScoreParams& params, long episodes,
                                Rng& rng) {
  return mc_mean(episodes, [&] {
    return rollout_episode(policy, expert, pm, params, rng).score;
  });
}

}  // namespace orl
