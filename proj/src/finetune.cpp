#include "orl/finetune.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orl {

std::pair<EpisodeLog, OverrideDataset> deploy_with_overrides(
    const DiscreteQ& model, const std::vector<int>& expert,
    const DiscreteMdp& mdp, const ScoreParams& params, Rng& rng) {
  EpisodeLog log;
  OverrideDataset overrides;
  int s = env_reset(mdp, rng);
  for (int t = 0; t < params.horizon; ++t) {
    const std::vector<double> row = model.q_row(s);
    const int proposed = argmax_lowest(row);
    const int a_e = expert[s];
    const bool trigger = proposed != a_e;
    if (trigger) ++log.disagreements;
    const int executed = trigger ? a_e : proposed;
    const StepResult step = env_step(mdp, s, executed, rng);
    log.env_return += step.reward;
    ++log.steps;
    if (trigger)
      overrides.transitions.push_back(
          Transition::discrete(s, a_e, step.reward, step.next, step.done));
    s = step.next;
    if (step.done) break;
  }
  log.score = online_score(log.env_return, log.disagreements, params);
  return {log, overrides};
}

std::pair<EpisodeLog, OverrideDataset> deploy_with_overrides(
    const ActorCritic& model, const ContinuousPolicyFn& expert,
    const PointMassSpec& pm, const ScoreParams& params, double tau, Rng& rng) {
  EpisodeLog log;
  OverrideDataset overrides;
  Vec2 s = pm_reset(pm, rng);
  for (int t = 0; t < params.horizon; ++t) {
    const double proposed = pm_clip(pm, model.actor.forward({s[0], s[1]})[0]);
    const double a_e = expert(s);
    const double d = proposed - a_e;
    const bool trigger = d * d > tau;
    if (trigger) ++log.disagreements;
    const double executed = trigger ? a_e : proposed;
    const PmStep step = pm_step(pm, s, executed, rng);
    log.env_return += step.reward;
    ++log.steps;
    if (trigger) {
      Transition tr;
      tr.s = {s[0], s[1]};
      tr.a = {a_e};
      tr.r = step.reward;
      tr.sp = {step.next[0], step.next[1]};
      tr.done = false;
      overrides.transitions.push_back(std::move(tr));
    }
    s = step.next;
  }
  log.score = online_score(log.env_return, log.disagreements, params);
  return {log, overrides};
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(static_cast<int>(i))]);
  return idx;
}

template <typename StepFn>
void minibatch_epochs(const std::vector<Transition>& data, int epochs,
                      int minibatch, Rng& rng, StepFn&& do_step) {
  const std::size_t n = data.size();
  const std::size_t bs = std::min<std::size_t>(std::max(minibatch, 1), n);
  std::vector<const Transition*> batch;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const std::vector<std::size_t> idx = shuffled_indices(n, rng);
    for (std::size_t start = 0; start < n; start += bs) {
      batch.clear();
      const std::size_t end = std::min(n, start + bs);
      for (std::size_t i = start; i < end; ++i) batch.push_back(&data[idx[i]]);
      do_step(batch);
    }
  }
}

}  // namespace

void finetune_discrete(DiscreteQ& q, const OverrideDataset& log,
                       const FinetuneConfig& cfg, Rng& rng) {
  if (log.transitions.empty())
    throw std::invalid_argument("finetune_discrete: empty override log");
  DiscreteQ target = q;
  OptimState opt;
  opt.lr = cfg.lr;
  std::vector<double> grad;
  long updates = 0;
  minibatch_epochs(log.transitions, cfg.epochs, cfg.minibatch, rng,
                   [&](const std::vector<const Transition*>& batch) {
                     grad.assign(q.params().size(), 0.0);
                     bellman_margin_loss(q, target, batch, cfg.gamma,
                                         cfg.delta, &grad);
                     opt_step(q.params(), grad, opt);
                     if (++updates % cfg.target_refresh == 0) target = q;
                   });
}

void finetune_critic_continuous(ActorCritic& ac, const OverrideDataset& log,
                                const FinetuneConfig& cfg, Rng& rng) {
  if (log.transitions.empty())
    throw std::invalid_argument("finetune_critic: empty override log");
  Mlp critic_target = ac.critic;
  Mlp actor_target = ac.actor;
  OptimState opt;
  opt.lr = cfg.lr;
  std::vector<double> grad;
  long updates = 0;
  minibatch_epochs(log.transitions, cfg.epochs, cfg.minibatch, rng,
                   [&](const std::vector<const Transition*>& batch) {
                     grad.assign(ac.critic.params().size(), 0.0);
                     critic_bellman_loss(ac.critic, critic_target,
                                         actor_target, batch, cfg.gamma,
                                         &grad);
                     opt_step(ac.critic.params(), grad, opt);
                     if (++updates % cfg.target_refresh == 0)
                       critic_target = ac.critic;
                   });
}

void finetune_actor_continuous(ActorCritic& ac, const OverrideDataset& log,
                               const FinetuneConfig& cfg, Rng& rng) {
  if (log.transitions.empty())
    throw std::invalid_argument("finetune_actor: empty override log");
  OptimState opt;
  opt.lr = cfg.lr;
  std::vector<double> grad;
  minibatch_epochs(log.transitions, cfg.epochs, cfg.minibatch, rng,
                   [&](const std::vector<const Transition*>& batch) {
                     grad.assign(ac.actor.params().size(), 0.0);
                     actor_loss(ac.actor, ac.critic, batch, cfg.actor_q_weight,
                                1.0, &grad);
                     opt_step(ac.actor.params(), grad, opt);
                   });
}

FinetuneTrace run_finetuning(DiscreteQ& model, const std::vector<int>& expert,
                             const DiscreteMdp& mdp, const ScoreParams& params,
                             const FinetuneConfig& cfg, Rng& rng) {
  if (cfg.iterations < 1)
    throw std::invalid_argument("run_finetuning: need >= 1 iteration");
  FinetuneTrace trace;
  OverrideDataset replay;
  for (long k = 0; k < cfg.iterations; ++k) {
    auto [log, overrides] =
        deploy_with_overrides(model, expert, mdp, params, rng);
    trace.env_return.push_back(log.env_return);
    trace.disagreements.push_back(log.disagreements);
    trace.overrides.push_back(static_cast<int>(overrides.transitions.size()));
    trace.score.push_back(log.score);
    if (cfg.replay) {
      replay.transitions.insert(replay.transitions.end(),
                                overrides.transitions.begin(),
                                overrides.transitions.end());
      replay.iteration = k;
      if (!replay.transitions.empty()) finetune_discrete(model, replay, cfg, rng);
    } else if (!overrides.transitions.empty()) {
      overrides.iteration = k;
      finetune_discrete(model, overrides, cfg, rng);
    }
    // override log is discarded here each iteration (unless --replay)
  }
  return trace;
}

FinetuneTrace run_finetuning(ActorCritic& model,
                             const ContinuousPolicyFn& expert,
                             const PointMassSpec& pm, const ScoreParams& params,
                             const FinetuneConfig& cfg, Rng& rng) {
  if (cfg.iterations < 1)
    throw std::invalid_argument("run_finetuning: need >= 1 iteration");
  FinetuneTrace trace;
  OverrideDataset replay;
  for (long k = 0; k < cfg.iterations; ++k) {
    auto [log, overrides] =
        deploy_with_overrides(model, expert, pm, params, cfg.tau, rng);
    trace.env_return.push_back(log.env_return);
    trace.disagreements.push_back(log.disagreements);
    trace.overrides.push_back(static_cast<int>(overrides.transitions.size()));
    trace.score.push_back(log.score);
    OverrideDataset* use = &overrides;
    if (cfg.replay) {
      replay.transitions.insert(replay.transitions.end(),
                                overrides.transitions.begin(),
                                overrides.transitions.end());
      replay.iteration = k;
      use = &replay;
    }
    if (!use->transitions.empty()) {
      use->iteration = k;
      finetune_critic_continuous(model, *use, cfg, rng);
      finetune_actor_continuous(model, *use, cfg, rng);
    }
  }
  return trace;
}

}  // namespace orl
