#pragma once

#include <string>

#include "orl/discrete_mdp.hpp"
#include "orl/gridworld.hpp"
#include "orl/pointmass.hpp"
#include "orl/queue_traffic.hpp"
#include "orl/scoring.hpp"

namespace orl {

// Built-in environment, its oracle expert, and the per-env score parameters.
// Ids: grid5, queue2, pointmass.
struct EnvBundle {
  std::string id;
  bool discrete = true;

  // discrete members
  DiscreteMdp mdp;
  std::vector<int> expert;

  // continuous members
  PointMassSpec pm;
  LinearGain expert_gain;

  ScoreParams score;

  ContinuousPolicyFn expert_fn() const;
};

EnvBundle make_env(const std::string& id);

}  // namespace orl
