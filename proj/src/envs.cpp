#include "orl/envs.hpp"

#include <stdexcept>

namespace orl {

ContinuousPolicyFn EnvBundle::expert_fn() const {
  return [pm = pm, gain = expert_gain](const Vec2& s) {
    return expert_action(pm, gain, s);
  };
}

EnvBundle make_env(const std::string& id) {
  EnvBundle env;
  env.id = id;
  if (id == "grid5") {
    const GridWorldSpec g = grid5_default();
    env.mdp = build_gridworld(g);
    env.expert = make_expert(
        env.mdp, entry_shaping(env.mdp, gridworld_hazard_mask(g), -2.0));
    env.score = {1.0, 0.1, 0.0, g.horizon};
  } else if (id == "queue2") {
    const QueueTrafficSpec q;
    env.mdp = build_queue_traffic(q);
    env.expert = make_expert(env.mdp, switch_aversion_shaping(q, 0.3));
    env.score = {1.0 / q.horizon, 1.0 / q.horizon, 0.0, q.horizon};
  } else if (id == "pointmass") {
    env.discrete = false;
    env.pm = PointMassSpec{};
    env.expert_gain = LinearGain{};
    if (closed_loop_spectral_radius(env.pm, env.expert_gain) >= 1.0)
      throw std::logic_error("pointmass: expert gain is not stabilizing");
    env.score = {1.0 / env.pm.horizon, 1.0 / env.pm.horizon, 0.09,
                 env.pm.horizon};
  } else {
    throw std::invalid_argument("unknown env id: " + id);
  }
  return env;
}

}  // namespace orl
