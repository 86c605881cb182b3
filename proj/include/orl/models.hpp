#pragma once

#include <span>
#include <string>
#include <vector>

#include "orl/mlp.hpp"
#include "orl/rng.hpp"

namespace orl {

// Lowest-index argmax; the tie-break convention used everywhere.
int argmax_lowest(std::span<const double> v);

struct TabularQ {
  int n_states = 0, n_actions = 0;
  std::vector<double> values;  // row-major [s][a]

  static TabularQ zeros(int n_states, int n_actions);

  double& at(int s, int a) { return values[static_cast<std::size_t>(s) * n_actions + a]; }
  double at(int s, int a) const { return values[static_cast<std::size_t>(s) * n_actions + a]; }
  std::span<const double> row(int s) const {
    return {values.data() + static_cast<std::size_t>(s) * n_actions,
            static_cast<std::size_t>(n_actions)};
  }
};

// Q-function over a finite MDP: either a dense table or a small MLP over
// one-hot state encodings. Both expose a flat parameter vector so the same
// optimizer and gradient checks apply.
struct DiscreteQ {
  enum class Kind { Tabular, Net };

  Kind kind = Kind::Tabular;
  int n_states = 0, n_actions = 0;
  TabularQ table;
  Mlp net;

  static DiscreteQ tabular(int n_states, int n_actions);
  static DiscreteQ mlp(int n_states, int n_actions,
                       const std::vector<int>& hidden, Rng& rng);

  std::vector<double>& params();
  const std::vector<double>& params() const;

  // Q(s, .) for all actions. For the net kind a cache may be captured for a
  // subsequent backward_row call on the same state.
  std::vector<double> q_row(int s, Mlp::Cache* cache = nullptr) const;

  // Accumulates dL/dparams given dL/dQ(s, .).
  void backward_row(int s, const Mlp::Cache& cache,
                    std::span<const double> dq, std::vector<double>& g) const;

  std::vector<int> greedy() const;  // ties to lowest action index
};

// Actor-critic pair for continuous control. The critic maps (s, a) to a
// scalar; the actor maps s to a tanh-squashed action.
struct ActorCritic {
  Mlp actor;
  Mlp critic;

  static ActorCritic make(int state_dim, int action_dim,
                          const std::vector<int>& hidden, double action_scale,
                          Rng& rng);
};

struct OptimState {
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999;
  double eps = 1e-8;
  std::vector<double> m, v;
  long step = 0;
};

// Adaptive-moment update. Throws if any parameter becomes non-finite.
void opt_step(std::vector<double>& params, const std::vector<double>& grad,
              OptimState& opt);

struct FiniteDiffReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  bool pass = false;
  std::vector<double> rel_error;
};

// Central finite differences against an analytic gradient. The loss callable
// evaluates at the current contents of params; params is restored afterwards.
template <typename Loss>
FiniteDiffReport finite_diff_check(std::vector<double>& params,
                                   const Loss& loss,
                                   const std::vector<double>& grad, double h,
                                   double tol) {
  FiniteDiffReport rep;
  rep.rel_error.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss();
    params[i] = saved - h;
    const double down = loss();
    params[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double g = grad[i];
    double denom = std::abs(g) > std::abs(fd) ? std::abs(g) : std::abs(fd);
    if (denom < 1e-5) denom = 1e-5;
    rep.rel_error[i] = std::abs(g - fd) / denom;
    if (rep.rel_error[i] > rep.max_rel_error) {
      rep.max_rel_error = rep.rel_error[i];
      rep.worst_index = i;
    }
  }
  rep.pass = rep.max_rel_error < tol;
  return rep;
}

}  // namespace orl
