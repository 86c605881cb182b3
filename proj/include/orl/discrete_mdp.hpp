#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "orl/models.hpp"
#include "orl/rng.hpp"

namespace orl {

struct Outcome {
  int next = 0;
  double prob = 0.0;
};

// Finite MDP with a sparse tabular transition kernel. Terminal states are
// absorbing: entering one ends the episode and they contribute no further
// reward in value iteration or the expected-score recursion.
struct DiscreteMdp {
  int n_states = 0, n_actions = 0;
  double gamma = 0.95;
  int horizon = 50;
  std::vector<std::vector<std::vector<Outcome>>> trans;  // [s][a] -> outcomes
  std::vector<double> reward;                            // [s * A + a]
  std::vector<double> initial;                           // distribution over states
  std::vector<std::uint8_t> terminal;
  // Optional per-state entry bonus. `reward` always stores the expected
  // reward (what planning uses); when this is non-empty, env_step replaces
  // the expected entry component with the bonus of the realized next state,
  // so sampled returns keep the same mean but only pay goal/hazard bonuses
  // on the transitions that actually land there.
  std::vector<double> entry_bonus;

  double r(int s, int a) const {
    return reward[static_cast<std::size_t>(s) * n_actions + a];
  }
  double& r(int s, int a) {
    return reward[static_cast<std::size_t>(s) * n_actions + a];
  }

  static DiscreteMdp empty(int n_states, int n_actions);

  // Checks row sums (1 +- 1e-9), gamma in (0,1), horizon >= 1, finite
  // rewards, normalized initial distribution. Throws on violation.
  void validate() const;
};

int env_reset(const DiscreteMdp& m, Rng& rng);

struct StepResult {
  int next = 0;
  double reward = 0.0;
  bool done = false;
};

StepResult env_step(const DiscreteMdp& m, int s, int a, Rng& rng);

// Value iteration to the Bellman fixed point, sup-norm residual <= tol.
TabularQ solve_optimal_q(const DiscreteMdp& m, double tol = 1e-8,
                         long max_sweeps = 100000);

double bellman_residual(const DiscreteMdp& m, const TabularQ& q);

std::vector<int> greedy_policy(const TabularQ& q);

// Expert construction: greedy policy of the MDP with the shaping bonus added
// to the reward. A null shaping yields the plain optimal policy.
std::vector<int> make_expert(const DiscreteMdp& m,
                             const std::function<double(int, int)>& shaping = {});

// Shaping helper: bonus * P(next state is in `cells` | s, a).
std::function<double(int, int)> entry_shaping(const DiscreteMdp& m,
                                              std::vector<std::uint8_t> cells,
                                              double bonus);

}  // namespace orl
