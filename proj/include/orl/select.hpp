#pragma once

#include <functional>
#include <vector>

#include "orl/offline.hpp"
#include "orl/rng.hpp"

namespace orl {

// Bandit bookkeeping for UCB model selection: per-arm pull counts and score
// sums plus the iteration counter.
struct UcbState {
  int arms = 0;
  double beta = 1.0;
  std::vector<long> n;
  std::vector<double> x;
  long k = 0;

  static UcbState init(int arms, double beta);
};

// Forced round-robin until every arm has been pulled once, then
// argmax of empirical mean + beta * sqrt(1/n); ties to lowest index.
int ucb_select(const UcbState& st);

void ucb_update(UcbState& st, int arm, double score);

struct SelectionTrace {
  std::vector<int> arm;
  std::vector<double> score;
  std::vector<double> regret;  // cumulative score - S*; nonpositive in expectation
  double s_star = 0.0;
};

// Prefix sums of (score_k - s_star).
std::vector<double> cumulative_regret(const std::vector<double>& scores,
                                      double s_star);

// Generic UCB loop: deploy(arm, rng) runs one supervised episode of the
// chosen arm and returns its realized score.
SelectionTrace run_selection(int arms, long iterations, double beta,
                             double s_star,
                             const std::function<double(int, Rng&)>& deploy,
                             Rng& rng);

// Baseline: argmax over models of the mean greedy Q-value on dataset states.
int baseline_highest_q(const std::vector<DiscreteQ>& models,
                       const Dataset& data);
int baseline_highest_q(const std::vector<ActorCritic>& models,
                       const Dataset& data);

int baseline_random_ensemble(int arms, Rng& rng);

}  // namespace orl
