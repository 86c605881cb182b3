#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orl/envs.hpp"
#include "orl/models.hpp"
#include "orl/scoring.hpp"

namespace orl {

struct Dataset {
  std::string env_id;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::vector<Transition> transitions;

  bool discrete_actions() const;
};

// Epsilon-greedy rollout of the expert: expert action with prob 1-eps,
// uniform random action otherwise. Episodes restart on done or at the
// horizon; exactly n_steps transitions are logged.
Dataset collect_dataset(const DiscreteMdp& mdp, const std::vector<int>& expert,
                        double epsilon, long n_steps, Rng& rng,
                        std::string env_id = {});

Dataset collect_dataset(const PointMassSpec& pm, const LinearGain& expert,
                        double epsilon, long n_steps, Rng& rng,
                        std::string env_id = {});

struct OfflineConfig {
  double lambda = 0.0;  // conservatism penalty scale
  int epochs = 30;
  int minibatch = 64;
  double lr = 0.02;  // tabular default; MLP paths use 1e-3
  double gamma = 0.95;
  std::uint64_t seed = 0;
  int target_refresh = 100;  // updates between bootstrap-target refreshes
};

// --- batch losses (exposed for gradient verification) -------------------
// Each returns the loss value and, when grad != nullptr, accumulates the
// exact reverse-mode gradient of that value into *grad (resized to the
// parameter count). Bootstrap targets are read from the frozen target
// models, so the loss is a plain differentiable function of q's parameters.

// Squared Bellman error plus the logsumexp conservatism penalty.
double bellman_cql_loss(const DiscreteQ& q, const DiscreteQ& target,
                        const std::vector<const Transition*>& batch,
                        double gamma, double lambda,
                        std::vector<double>* grad);

// Margin term of the fine-tuning objective for one state row.
double margin_loss(std::span<const double> q_row, int expert_a, double delta);

// Squared Bellman error plus the margin term, over an override batch.
double bellman_margin_loss(const DiscreteQ& q, const DiscreteQ& target,
                           const std::vector<const Transition*>& batch,
                           double gamma, double delta,
                           std::vector<double>* grad);

// Critic loss with actor-based bootstrap target.
double critic_bellman_loss(const Mlp& critic, const Mlp& critic_target,
                           const Mlp& actor_target,
                           const std::vector<const Transition*>& batch,
                           double gamma, std::vector<double>* grad);

// Actor loss: -q_weight * mean Q(s, pi(s)) + bc_weight * mean ||pi(s)-a||^2.
// Gradient is with respect to the actor parameters only.
double actor_loss(const Mlp& actor, const Mlp& critic,
                  const std::vector<const Transition*>& batch, double q_weight,
                  double bc_weight, std::vector<double>* grad);

// Mean squared Bellman residual of q over a dataset (diagnostic).
double dataset_bellman_residual(const DiscreteQ& q, const Dataset& data,
                                double gamma);

enum class QKind { Tabular, Net };

DiscreteQ train_offline_discrete(const Dataset& data, const OfflineConfig& cfg,
                                 int n_states, int n_actions,
                                 QKind kind = QKind::Tabular);

ActorCritic train_offline_continuous(const Dataset& data,
                                     const OfflineConfig& cfg,
                                     const PointMassSpec& pm);

struct CandidateSet {
  std::string env_id;
  std::vector<double> lambdas;
  std::vector<DiscreteQ> q;        // discrete envs
  std::vector<ActorCritic> ac;     // continuous envs
  std::size_t size() const;
};

// One shared dataset, one model per lambda, each trained with a distinct
// derived seed; model order matches the lambda grid.
CandidateSet build_candidates(const EnvBundle& env,
                              const std::vector<double>& lambdas,
                              const OfflineConfig& base, long dataset_steps,
                              double epsilon, std::uint64_t master_seed,
                              QKind kind = QKind::Tabular);

CandidateSet build_candidates(const EnvBundle& env,
                              const std::vector<double>& lambdas,
                              const Dataset& data, const OfflineConfig& base,
                              std::uint64_t master_seed,
                              QKind kind = QKind::Tabular);

}  // namespace orl
