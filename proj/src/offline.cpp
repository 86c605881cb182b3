#include "orl/offline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orl {

bool Dataset::discrete_actions() const {
  return !transitions.empty() && transitions.front().s.size() == 1 &&
         transitions.front().a.size() == 1;
}

Dataset collect_dataset(const DiscreteMdp& mdp, const std::vector<int>& expert,
                        double epsilon, long n_steps, Rng& rng,
                        std::string env_id) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("collect_dataset: epsilon must be in [0,1]");
  if (n_steps < 1) throw std::invalid_argument("collect_dataset: n_steps < 1");
  Dataset data;
  data.env_id = std::move(env_id);
  data.epsilon = epsilon;
  data.transitions.reserve(n_steps);
  int s = env_reset(mdp, rng);
  int t = 0;
  for (long i = 0; i < n_steps; ++i) {
    int a = expert[s];
    if (epsilon > 0.0 && rng.uniform() < epsilon)
      a = rng.uniform_int(mdp.n_actions);
    const StepResult step = env_step(mdp, s, a, rng);
    data.transitions.push_back(
        Transition::discrete(s, a, step.reward, step.next, step.done));
    ++t;
    if (step.done || t >= mdp.horizon) {
      s = env_reset(mdp, rng);
      t = 0;
    } else {
      s = step.next;
    }
  }
  return data;
}

Dataset collect_dataset(const PointMassSpec& pm, const LinearGain& expert,
                        double epsilon, long n_steps, Rng& rng,
                        std::string env_id) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("collect_dataset: epsilon must be in [0,1]");
  if (n_steps < 1) throw std::invalid_argument("collect_dataset: n_steps < 1");
  Dataset data;
  data.env_id = std::move(env_id);
  data.epsilon = epsilon;
  data.transitions.reserve(n_steps);
  Vec2 s = pm_reset(pm, rng);
  int t = 0;
  for (long i = 0; i < n_steps; ++i) {
    double a = expert_action(pm, expert, s);
    if (epsilon > 0.0 && rng.uniform() < epsilon)
      a = rng.uniform(pm.action_lo, pm.action_hi);
    const PmStep step = pm_step(pm, s, a, rng);
    Transition tr;
    tr.s = {s[0], s[1]};
    tr.a = {a};
    tr.r = step.reward;
    tr.sp = {step.next[0], step.next[1]};
    tr.done = false;
    data.transitions.push_back(std::move(tr));
    ++t;
    if (t >= pm.horizon) {
      s = pm_reset(pm, rng);
      t = 0;
    } else {
      s = step.next;
    }
  }
  return data;
}

namespace {

double bootstrap_max(const DiscreteQ& target, int sp) {
  const std::vector<double> row = target.q_row(sp);
  return *std::max_element(row.begin(), row.end());
}

void ensure_grad(std::vector<double>* grad, std::size_t n) {
  if (grad && grad->size() != n) grad->assign(n, 0.0);
}

}  // namespace

double bellman_cql_loss(const DiscreteQ& q, const DiscreteQ& target,
                        const std::vector<const Transition*>& batch,
                        double gamma, double lambda,
                        std::vector<double>* grad) {
  if (batch.empty()) throw std::invalid_argument("bellman_cql_loss: empty batch");
  ensure_grad(grad, q.params().size());
  const double inv = 1.0 / batch.size();
  double loss = 0.0;
  std::vector<double> dq(q.n_actions);
  for (const Transition* tr : batch) {
    const int s = tr->si(), a = tr->ai();
    Mlp::Cache cache;
    const std::vector<double> row = q.q_row(s, grad ? &cache : nullptr);
    const double y =
        tr->r + (tr->done ? 0.0 : gamma * bootstrap_max(target, tr->spi()));
    const double err = row[a] - y;
    loss += inv * err * err;
    std::fill(dq.begin(), dq.end(), 0.0);
    dq[a] = inv * 2.0 * err;
    if (lambda > 0.0) {
      // The subtracted data-action value is read from the frozen target, like
      // the bootstrap: the penalty then only depresses out-of-distribution
      // actions instead of also inflating Q(s, a_data) without bound.
      const double m = *std::max_element(row.begin(), row.end());
      double z = 0.0;
      for (double v : row) z += std::exp(v - m);
      loss += inv * lambda * (m + std::log(z) - target.q_row(s)[a]);
      for (int j = 0; j < q.n_actions; ++j)
        dq[j] += inv * lambda * std::exp(row[j] - m) / z;
    }
    if (grad) q.backward_row(s, cache, dq, *grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("bellman_cql_loss: non-finite loss in batch");
  }
  return loss;
}

double margin_loss(std::span<const double> q_row, int expert_a, double delta) {
  if (expert_a < 0 || expert_a >= static_cast<int>(q_row.size()))
    throw std::invalid_argument("margin_loss: invalid expert action");
  double best = -1e300;
  for (std::size_t j = 0; j < q_row.size(); ++j) {
    const double v =
        q_row[j] + (static_cast<int>(j) != expert_a ? delta : 0.0);
    if (v > best) best = v;
  }
  return best - q_row[expert_a];
}

double bellman_margin_loss(const DiscreteQ& q, const DiscreteQ& target,
                           const std::vector<const Transition*>& batch,
                           double gamma, double delta,
                           std::vector<double>* grad) {
  if (batch.empty())
    throw std::invalid_argument("bellman_margin_loss: empty batch");
  ensure_grad(grad, q.params().size());
  const double inv = 1.0 / batch.size();
  double loss = 0.0;
  std::vector<double> dq(q.n_actions);
  for (const Transition* tr : batch) {
    const int s = tr->si(), a = tr->ai();
    Mlp::Cache cache;
    const std::vector<double> row = q.q_row(s, grad ? &cache : nullptr);
    const double y =
        tr->r + (tr->done ? 0.0 : gamma * bootstrap_max(target, tr->spi()));
    const double err = row[a] - y;
    // argmax branch of the margin term, ties to lowest index
    int jstar = 0;
    double best = -1e300;
    for (int j = 0; j < q.n_actions; ++j) {
      const double v = row[j] + (j != a ? delta : 0.0);
      if (v > best) {
        best = v;
        jstar = j;
      }
    }
    loss += inv * (err * err + best - row[a]);
    std::fill(dq.begin(), dq.end(), 0.0);
    dq[a] = inv * 2.0 * err;
    dq[jstar] += inv;
    dq[a] -= inv;
    if (grad) q.backward_row(s, cache, dq, *grad);
    if (!std::isfinite(loss))
      throw std::runtime_error("bellman_margin_loss: non-finite loss in batch");
  }
  return loss;
}

double critic_bellman_loss(const Mlp& critic, const Mlp& critic_target,
                           const Mlp& actor_target,
                           const std::vector<const Transition*>& batch,
                           double gamma, std::vector<double>* grad) {
  if (batch.empty())
    throw std::invalid_argument("critic_bellman_loss: empty batch");
  ensure_grad(grad, critic.params().size());
  const double inv = 1.0 / batch.size();
  double loss = 0.0;
  for (const Transition* tr : batch) {
    double y = tr->r;
    if (!tr->done) {
      const std::vector<double> ap = actor_target.forward(tr->sp);
      std::vector<double> spa(tr->sp);
      spa.insert(spa.end(), ap.begin(), ap.end());
      y += gamma * critic_target.forward(spa)[0];
    }
    std::vector<double> sa(tr->s);
    sa.insert(sa.end(), tr->a.begin(), tr->a.end());
    Mlp::Cache cache;
    const double qv = critic.forward(sa, grad ? &cache : nullptr)[0];
    const double err = qv - y;
    loss += inv * err * err;
    if (grad) {
      const double dout[1] = {inv * 2.0 * err};
      critic.backward(cache, dout, *grad);
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("critic_bellman_loss: non-finite loss in batch");
  }
  return loss;
}

double actor_loss(const Mlp& actor, const Mlp& critic,
                  const std::vector<const Transition*>& batch, double q_weight,
                  double bc_weight, std::vector<double>* grad) {
  if (batch.empty()) throw std::invalid_argument("actor_loss: empty batch");
  ensure_grad(grad, actor.params().size());
  const double inv = 1.0 / batch.size();
  const int sdim = actor.input_dim();
  const int adim = actor.output_dim();
  double loss = 0.0;
  std::vector<double> critic_scratch;
  for (const Transition* tr : batch) {
    Mlp::Cache acache;
    const std::vector<double> api = actor.forward(tr->s, grad ? &acache : nullptr);
    std::vector<double> sa(tr->s);
    sa.insert(sa.end(), api.begin(), api.end());
    Mlp::Cache ccache;
    const double qv = critic.forward(sa, &ccache)[0];
    double mse = 0.0;
    for (int j = 0; j < adim; ++j) {
      const double d = api[j] - tr->a[j];
      mse += d * d;
    }
    loss += inv * (-q_weight * qv + bc_weight * mse);
    if (grad) {
      const double dout[1] = {-inv * q_weight};
      std::vector<double> dsa;
      critic_scratch.assign(critic.params().size(), 0.0);
      critic.backward(ccache, dout, critic_scratch, &dsa);
      std::vector<double> dpi(adim);
      for (int j = 0; j < adim; ++j)
        dpi[j] = dsa[sdim + j] + inv * bc_weight * 2.0 * (api[j] - tr->a[j]);
      actor.backward(acache, dpi, *grad);
    }
    if (!std::isfinite(loss))
      throw std::runtime_error("actor_loss: non-finite loss in batch");
  }
  return loss;
}

double dataset_bellman_residual(const DiscreteQ& q, const Dataset& data,
                                double gamma) {
  if (data.transitions.empty())
    throw std::invalid_argument("dataset_bellman_residual: empty dataset");
  double acc = 0.0;
  for (const Transition& tr : data.transitions) {
    const double y =
        tr.r + (tr.done ? 0.0 : gamma * bootstrap_max(q, tr.spi()));
    const double err = q.q_row(tr.si())[tr.ai()] - y;
    acc += err * err;
  }
  return acc / data.transitions.size();
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i)
    std::swap(idx[i - 1], idx[rng.uniform_int(static_cast<int>(i))]);
  return idx;
}

}  // namespace

DiscreteQ train_offline_discrete(const Dataset& data, const OfflineConfig& cfg,
                                 int n_states, int n_actions, QKind kind) {
  if (data.transitions.empty())
    throw std::invalid_argument("train_offline_discrete: empty dataset");
  if (!data.discrete_actions())
    throw std::invalid_argument(
        "train_offline_discrete: continuous-action dataset is unsupported");
  if (cfg.lambda < 0.0)
    throw std::invalid_argument("train_offline_discrete: lambda < 0");

  Rng rng(cfg.seed);
  DiscreteQ q = kind == QKind::Tabular
                    ? DiscreteQ::tabular(n_states, n_actions)
                    : DiscreteQ::mlp(n_states, n_actions, {32, 32}, rng);
  DiscreteQ target = q;
  OptimState opt;
  opt.lr = cfg.lr;
  std::vector<double> grad;
  long updates = 0;
  const std::size_t n = data.transitions.size();
  const std::size_t bs = std::min<std::size_t>(cfg.minibatch, n);
  std::vector<const Transition*> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<std::size_t> idx = shuffled_indices(n, rng);
    for (std::size_t start = 0; start + bs <= n; start += bs) {
      batch.clear();
      for (std::size_t i = start; i < start + bs; ++i)
        batch.push_back(&data.transitions[idx[i]]);
      grad.assign(q.params().size(), 0.0);
      bellman_cql_loss(q, target, batch, cfg.gamma, cfg.lambda, &grad);
      opt_step(q.params(), grad, opt);
      if (++updates % cfg.target_refresh == 0) target = q;
    }
  }
  return q;
}

ActorCritic train_offline_continuous(const Dataset& data,
                                     const OfflineConfig& cfg,
                                     const PointMassSpec& pm) {
  if (data.transitions.empty())
    throw std::invalid_argument("train_offline_continuous: empty dataset");
  if (data.discrete_actions())
    throw std::invalid_argument(
        "train_offline_continuous: discrete-action dataset is unsupported");
  if (cfg.lambda < 0.0)
    throw std::invalid_argument("train_offline_continuous: lambda < 0");

  Rng rng(cfg.seed);
  ActorCritic ac = ActorCritic::make(2, 1, {32, 32},
                                     std::max(std::abs(pm.action_lo),
                                              std::abs(pm.action_hi)),
                                     rng);
  Mlp actor_target = ac.actor;
  Mlp critic_target = ac.critic;
  OptimState copt, aopt;
  copt.lr = cfg.lr;
  aopt.lr = cfg.lr;
  std::vector<double> cgrad, agrad;
  long updates = 0;
  const std::size_t n = data.transitions.size();
  const std::size_t bs = std::min<std::size_t>(cfg.minibatch, n);
  std::vector<const Transition*> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::vector<std::size_t> idx = shuffled_indices(n, rng);
    for (std::size_t start = 0; start + bs <= n; start += bs) {
      batch.clear();
      for (std::size_t i = start; i < start + bs; ++i)
        batch.push_back(&data.transitions[idx[i]]);
      cgrad.assign(ac.critic.params().size(), 0.0);
      critic_bellman_loss(ac.critic, critic_target, actor_target, batch,
                          cfg.gamma, &cgrad);
      opt_step(ac.critic.params(), cgrad, copt);
      agrad.assign(ac.actor.params().size(), 0.0);
      actor_loss(ac.actor, ac.critic, batch, 1.0, cfg.lambda, &agrad);
      opt_step(ac.actor.params(), agrad, aopt);
      if (++updates % cfg.target_refresh == 0) {
        actor_target = ac.actor;
        critic_target = ac.critic;
      }
    }
  }
  return ac;
}

std::size_t CandidateSet::size() const {
  return q.empty() ? ac.size() : q.size();
}

CandidateSet build_candidates(const EnvBundle& env,
                              const std::vector<double>& lambdas,
                              const OfflineConfig& base, long dataset_steps,
                              double epsilon, std::uint64_t master_seed,
                              QKind kind) {
  Rng data_rng(derive_seed(master_seed, "dataset"));
  Dataset data =
      env.discrete
          ? collect_dataset(env.mdp, env.expert, epsilon, dataset_steps,
                            data_rng, env.id)
          : collect_dataset(env.pm, env.expert_gain, epsilon, dataset_steps,
                            data_rng, env.id);
  data.seed = derive_seed(master_seed, "dataset");
  return build_candidates(env, lambdas, data, base, master_seed, kind);
}

CandidateSet build_candidates(const EnvBundle& env,
                              const std::vector<double>& lambdas,
                              const Dataset& data, const OfflineConfig& base,
                              std::uint64_t master_seed, QKind kind) {
  if (lambdas.empty())
    throw std::invalid_argument("build_candidates: empty lambda grid");
  CandidateSet set;
  set.env_id = env.id;
  set.lambdas = lambdas;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    OfflineConfig cfg = base;
    cfg.lambda = lambdas[i];
    cfg.seed = derive_seed(master_seed, "train", i);
    cfg.gamma = env.discrete ? env.mdp.gamma : env.pm.gamma;
    if (env.discrete) {
      set.q.push_back(train_offline_discrete(data, cfg, env.mdp.n_states,
                                             env.mdp.n_actions, kind));
    } else {
      set.ac.push_back(train_offline_continuous(data, cfg, env.pm));
    }
  }
  return set;
}

}  // namespace orl
