#pragma once

#include <utility>

#include "orl/offline.hpp"

namespace orl {

struct FinetuneConfig {
  double tau = 0.09;   // continuous override trigger
  double delta = 1.0;  // discrete margin
  int epochs = 5;      // passes over the override log per iteration
  int minibatch = 32;  // capped at |override log|
  double lr = 0.05;    // tabular default; continuous callers use 5e-3
  long iterations = 200;
  double gamma = 0.95;
  int target_refresh = 100;
  double actor_q_weight = 1.0;  // weight of the Q term in the actor objective
  bool replay = false;  // keep overrides across iterations (non-faithful mode)
};

// Expert decisions logged when the override trigger fired; cleared at the
// end of every deployment iteration.
struct OverrideDataset {
  std::vector<Transition> transitions;
  long iteration = 0;
};

// One supervised episode: the model proposes, the expert overrides when the
// trigger fires, and overridden steps are logged with the expert's action.
// Disagreements are counted against the model's proposal, so they equal the
// number of logged overrides.
std::pair<EpisodeLog, OverrideDataset> deploy_with_overrides(
    const DiscreteQ& model, const std::vector<int>& expert,
    const DiscreteMdp& mdp, const ScoreParams& params, Rng& rng);

std::pair<EpisodeLog, OverrideDataset> deploy_with_overrides(
    const ActorCritic& model, const ContinuousPolicyFn& expert,
    const PointMassSpec& pm, const ScoreParams& params, double tau, Rng& rng);

// Bellman + margin descent on the override log (discrete).
void finetune_discrete(DiscreteQ& q, const OverrideDataset& log,
                       const FinetuneConfig& cfg, Rng& rng);

// Critic Bellman descent over the override log.
void finetune_critic_continuous(ActorCritic& ac, const OverrideDataset& log,
                                const FinetuneConfig& cfg, Rng& rng);

// Actor ascent on Q minus MSE to the expert's actions.
void finetune_actor_continuous(ActorCritic& ac, const OverrideDataset& log,
                               const FinetuneConfig& cfg, Rng& rng);

struct FinetuneTrace {
  std::vector<double> env_return;
  std::vector<int> disagreements;
  std::vector<int> overrides;
  std::vector<double> score;
};

// Full deployment loop; the model is fine-tuned in place.
FinetuneTrace run_finetuning(DiscreteQ& model, const std::vector<int>& expert,
                             const DiscreteMdp& mdp, const ScoreParams& params,
                             const FinetuneConfig& cfg, Rng& rng);

FinetuneTrace run_finetuning(ActorCritic& model,
                             const ContinuousPolicyFn& expert,
                             const PointMassSpec& pm, const ScoreParams& params,
                             const FinetuneConfig& cfg, Rng& rng);

}  // namespace orl
