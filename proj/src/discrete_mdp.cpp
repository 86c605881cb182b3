#include "orl/discrete_mdp.hpp"

#include <cmath>
#include <stdexcept>

namespace orl {

DiscreteMdp DiscreteMdp::empty(int n_states, int n_actions) {
  DiscreteMdp m;
  m.n_states = n_states;
  m.n_actions = n_actions;
  m.trans.assign(n_states, std::vector<std::vector<Outcome>>(n_actions));
  m.reward.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
  m.initial.assign(n_states, 0.0);
  m.terminal.assign(n_states, 0);
  return m;
}

void DiscreteMdp::validate() const {
  if (n_states <= 0 || n_actions <= 0)
    throw std::invalid_argument("DiscreteMdp: empty state or action space");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("DiscreteMdp: gamma must be inside (0,1)");
  if (horizon < 1) throw std::invalid_argument("DiscreteMdp: horizon < 1");
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      double sum = 0.0;
      for (const Outcome& o : trans[s][a]) {
        if (o.next < 0 || o.next >= n_states)
          throw std::invalid_argument("DiscreteMdp: transition out of range");
        sum += o.prob;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("DiscreteMdp: transition row does not sum to 1");
      if (!std::isfinite(r(s, a)))
        throw std::invalid_argument("DiscreteMdp: non-finite reward");
    }
  }
  if (!entry_bonus.empty()) {
    if (static_cast<int>(entry_bonus.size()) != n_states)
      throw std::invalid_argument("DiscreteMdp: entry_bonus size mismatch");
    for (double b : entry_bonus)
      if (!std::isfinite(b))
        throw std::invalid_argument("DiscreteMdp: non-finite entry bonus");
  }
  double mass = 0.0;
  for (double p : initial) mass += p;
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("DiscreteMdp: initial distribution not normalized");
}

int env_reset(const DiscreteMdp& m, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    acc += m.initial[s];
    if (u < acc) return s;
  }
  // numerical tail: return the last state with positive mass
  for (int s = m.n_states - 1; s >= 0; --s)
    if (m.initial[s] > 0.0) return s;
  throw std::logic_error("env_reset: empty initial distribution");
}

StepResult env_step(const DiscreteMdp& m, int s, int a, Rng& rng) {
  if (s < 0 || s >= m.n_states)
    throw std::invalid_argument("env_step: invalid state index");
  if (a < 0 || a >= m.n_actions)
    throw std::invalid_argument("env_step: invalid action index");
  const auto& row = m.trans[s][a];
  double u = rng.uniform();
  double acc = 0.0;
  int next = row.back().next;
  for (const Outcome& o : row) {
    acc += o.prob;
    if (u < acc) {
      next = o.next;
      break;
    }
  }
  double reward = m.r(s, a);
  if (!m.entry_bonus.empty()) {
    double expected_entry = 0.0;
    for (const Outcome& o : row) expected_entry += o.prob * m.entry_bonus[o.next];
    reward += m.entry_bonus[next] - expected_entry;
  }
  return {next, reward, m.terminal[next] != 0};
}

TabularQ solve_optimal_q(const DiscreteMdp& m, double tol, long max_sweeps) {
  if (m.n_states <= 0) throw std::invalid_argument("solve_optimal_q: finite spec required");
  TabularQ q = TabularQ::zeros(m.n_states, m.n_actions);
  std::vector<double> vmax(m.n_states, 0.0);
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int s = 0; s < m.n_states; ++s)
      vmax[s] = m.terminal[s] ? 0.0 : *std::max_element(q.row(s).begin(), q.row(s).end());
    double resid = 0.0;
    for (int s = 0; s < m.n_states; ++s) {
      for (int a = 0; a < m.n_actions; ++a) {
        double exp_next = 0.0;
        for (const Outcome& o : m.trans[s][a]) exp_next += o.prob * vmax[o.next];
        const double target = m.r(s, a) + m.gamma * exp_next;
        resid = std::max(resid, std::abs(target - q.at(s, a)));
        q.at(s, a) = target;
      }
    }
    if (resid <= tol) return q;
  }
  throw std::runtime_error("solve_optimal_q: did not converge");
}

double bellman_residual(const DiscreteMdp& m, const TabularQ& q) {
  double resid = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    for (int a = 0; a < m.n_actions; ++a) {
      double exp_next = 0.0;
      for (const Outcome& o : m.trans[s][a]) {
        if (!m.terminal[o.next]) {
          auto row = q.row(o.next);
          exp_next += o.prob * *std::max_element(row.begin(), row.end());
        }
      }
      resid = std::max(resid,
                       std::abs(q.at(s, a) - m.r(s, a) - m.gamma * exp_next));
    }
  }
  return resid;
}

std::vector<int> greedy_policy(const TabularQ& q) {
  std::vector<int> pi(q.n_states);
  for (int s = 0; s < q.n_states; ++s) pi[s] = argmax_lowest(q.row(s));
  return pi;
}

std::vector<int> make_expert(const DiscreteMdp& m,
                             const std::function<double(int, int)>& shaping) {
  if (!shaping) return greedy_policy(solve_optimal_q(m));
  DiscreteMdp shaped = m;
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a) shaped.r(s, a) += shaping(s, a);
  return greedy_policy(solve_optimal_q(shaped));
}

std::function<double(int, int)> entry_shaping(const DiscreteMdp& m,
                                              std::vector<std::uint8_t> cells,
                                              double bonus) {
  return [&m, cells = std::move(cells), bonus](int s, int a) {
    double p = 0.0;
    for (const Outcome& o : m.trans[s][a])
      if (cells[o.next]) p += o.prob;
    return bonus * p;
  };
}

}  // namespace orl
