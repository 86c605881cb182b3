#pragma once

#include <functional>
#include <vector>

#include "orl/discrete_mdp.hpp"
#include "orl/pointmass.hpp"
#include "orl/rng.hpp"

namespace orl {

struct ScoreParams {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double tau = 0.0;  // continuous disagreement tolerance; unused for discrete
  int horizon = 50;
};

struct Transition {
  std::vector<double> s, sp;
  std::vector<double> a;
  double r = 0.0;
  bool done = false;

  static Transition discrete(int s, int a, double r, int sp, bool done);
  int si() const { return static_cast<int>(s[0]); }
  int ai() const { return static_cast<int>(a[0]); }
  int spi() const { return static_cast<int>(sp[0]); }
};

struct EpisodeLog {
  double env_return = 0.0;
  int disagreements = 0;
  int steps = 0;
  double score = 0.0;
  std::vector<Transition> transitions;  // filled only when requested
};

double online_score(double env_return, int disagreements,
                    const ScoreParams& params);

using ContinuousPolicyFn = std::function<double(const Vec2&)>;

// Rolls one supervised episode executing the policy's own actions.
// Disagreements count steps where the policy's proposal differs from the
// expert's (discrete) or deviates by squared distance > tau (continuous).
EpisodeLog rollout_episode(const std::vector<int>& policy,
                           const std::vector<int>& expert,
                           const DiscreteMdp& mdp, const ScoreParams& params,
                           Rng& rng, bool log_transitions = false);

EpisodeLog rollout_episode(const ContinuousPolicyFn& policy,
                           const ContinuousPolicyFn& expert,
                           const PointMassSpec& pm, const ScoreParams& params,
                           Rng& rng, bool log_transitions = false);

struct ExpectedScore {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
  long episodes = 0;
  bool exact = false;
};

// Finite-horizon dynamic programming over the Markov chain induced by a
// deterministic policy; exact up to floating point.
ExpectedScore expected_score_exact(const DiscreteMdp& mdp,
                                   const std::vector<int>& policy,
                                   const std::vector<int>& expert,
                                   const ScoreParams& params);

ExpectedScore expected_score_mc(const DiscreteMdp& mdp,
                                const std::vector<int>& policy,
                                const std::vector<int>& expert,
                                const ScoreParams& params, long episodes,
                                Rng& rng);

ExpectedScore expected_score_mc(const PointMassSpec& pm,
                                const ContinuousPolicyFn& policy,
                                const ContinuousPolicyFn& expert,
                                const ScoreParams& params, long episodes,
                                Rng& rng);

}  // namespace orl
