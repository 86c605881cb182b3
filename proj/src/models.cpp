#include "orl/models.hpp"

#include <cmath>
#include <stdexcept>

namespace orl {

int argmax_lowest(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("argmax over empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return static_cast<int>(best);
}

TabularQ TabularQ::zeros(int n_states, int n_actions) {
  TabularQ q;
  q.n_states = n_states;
  q.n_actions = n_actions;
  q.values.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  return q;
}

DiscreteQ DiscreteQ::tabular(int n_states, int n_actions) {
  DiscreteQ q;
  q.kind = Kind::Tabular;
  q.n_states = n_states;
  q.n_actions = n_actions;
  q.table = TabularQ::zeros(n_states, n_actions);
  return q;
}

DiscreteQ DiscreteQ::mlp(int n_states, int n_actions,
                         const std::vector<int>& hidden, Rng& rng) {
  DiscreteQ q;
  q.kind = Kind::Net;
  q.n_states = n_states;
  q.n_actions = n_actions;
  std::vector<int> sizes;
  sizes.push_back(n_states);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(n_actions);
  q.net = Mlp(sizes);
  q.net.init_xavier(rng);
  return q;
}

std::vector<double>& DiscreteQ::params() {
  return kind == Kind::Tabular ? table.values : net.params();
}

const std::vector<double>& DiscreteQ::params() const {
  return kind == Kind::Tabular ? table.values : net.params();
}

std::vector<double> DiscreteQ::q_row(int s, Mlp::Cache* cache) const {
  if (s < 0 || s >= n_states)
    throw std::invalid_argument("DiscreteQ: state index out of range");
  if (kind == Kind::Tabular) {
    auto r = table.row(s);
    return {r.begin(), r.end()};
  }
  std::vector<double> onehot(n_states, 0.0);
  onehot[s] = 1.0;
  return net.forward(onehot, cache);
}

void DiscreteQ::backward_row(int s, const Mlp::Cache& cache,
                             std::span<const double> dq,
                             std::vector<double>& g) const {
  if (g.size() != params().size()) g.assign(params().size(), 0.0);
  if (kind == Kind::Tabular) {
    for (int a = 0; a < n_actions; ++a)
      g[static_cast<std::size_t>(s) * n_actions + a] += dq[a];
    return;
  }
  net.backward(cache, dq, g);
}

std::vector<int> DiscreteQ::greedy() const {
  std::vector<int> pi(n_states);
  for (int s = 0; s < n_states; ++s) pi[s] = argmax_lowest(q_row(s));
  return pi;
}

ActorCritic ActorCritic::make(int state_dim, int action_dim,
                              const std::vector<int>& hidden,
                              double action_scale, Rng& rng) {
  ActorCritic ac;
  std::vector<int> asz, csz;
  asz.push_back(state_dim);
  csz.push_back(state_dim + action_dim);
  for (int h : hidden) {
    asz.push_back(h);
    csz.push_back(h);
  }
  asz.push_back(action_dim);
  csz.push_back(1);
  ac.actor = Mlp(asz, /*squash_output=*/true, action_scale);
  ac.critic = Mlp(csz);
  ac.actor.init_xavier(rng);
  ac.critic.init_xavier(rng);
  return ac;
}

void opt_step(std::vector<double>& params, const std::vector<double>& grad,
              OptimState& opt) {
  if (grad.size() != params.size())
    throw std::invalid_argument("opt_step: shape mismatch");
  if (opt.m.size() != params.size()) {
    opt.m.assign(params.size(), 0.0);
    opt.v.assign(params.size(), 0.0);
  }
  ++opt.step;
  const double bc1 = 1.0 - std::pow(opt.beta1, opt.step);
  const double bc2 = 1.0 - std::pow(opt.beta2, opt.step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * grad[i];
    opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * grad[i] * grad[i];
    const double mhat = opt.m[i] / bc1;
    const double vhat = opt.v[i] / bc2;
    params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
    if (!std::isfinite(params[i]))
      throw std::runtime_error("opt_step: non-finite parameter after update");
  }
}

}  // namespace orl
