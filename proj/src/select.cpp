#include "orl/select.hpp"

#include <cmath>
#include <stdexcept>

namespace orl {

UcbState UcbState::init(int arms, double beta) {
  if (arms < 1) throw std::invalid_argument("UcbState: need at least one arm");
  UcbState st;
  st.arms = arms;
  st.beta = beta;
  st.n.assign(arms, 0);
  st.x.assign(arms, 0.0);
  return st;
}

int ucb_select(const UcbState& st) {
  if (st.arms < 1) throw std::invalid_argument("ucb_select: no arms");
  for (int i = 0; i < st.arms; ++i)
    if (st.n[i] == 0) return i;
  int best = 0;
  double best_v = -1e300;
  for (int i = 0; i < st.arms; ++i) {
    const double v = st.x[i] / st.n[i] + st.beta * std::sqrt(1.0 / st.n[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

void ucb_update(UcbState& st, int arm, double score) {
  if (arm < 0 || arm >= st.arms)
    throw std::invalid_argument("ucb_update: invalid arm index");
  st.n[arm] += 1;
  st.x[arm] += score;
  st.k += 1;
}

std::vector<double> cumulative_regret(const std::vector<double>& scores,
                                      double s_star) {
  if (!std::isfinite(s_star))
    throw std::invalid_argument("cumulative_regret: s_star must be finite");
  std::vector<double> out(scores.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    acc += scores[i] - s_star;
    out[i] = acc;
  }
  return out;
}

SelectionTrace run_selection(int arms, long iterations, double beta,
                             double s_star,
                             const std::function<double(int, Rng&)>& deploy,
                             Rng& rng) {
  if (iterations < 1)
    throw std::invalid_argument("run_selection: need at least one iteration");
  UcbState st = UcbState::init(arms, beta);
  SelectionTrace trace;
  trace.s_star = s_star;
  for (long k = 0; k < iterations; ++k) {
    const int arm = ucb_select(st);
    const double score = deploy(arm, rng);
    ucb_update(st, arm, score);
    trace.arm.push_back(arm);
    trace.score.push_back(score);
  }
  trace.regret = cumulative_regret(trace.score, s_star);
  return trace;
}

int baseline_highest_q(const std::vector<DiscreteQ>& models,
                       const Dataset& data) {
  if (models.empty()) throw std::invalid_argument("highest_q: no models");
  if (data.transitions.empty())
    throw std::invalid_argument("highest_q: empty dataset");
  int best = 0;
  double best_v = -1e300;
  for (std::size_t i = 0; i < models.size(); ++i) {
    double acc = 0.0;
    for (const Transition& tr : data.transitions) {
      const std::vector<double> row = models[i].q_row(tr.si());
      acc += row[argmax_lowest(row)];
    }
    const double v = acc / data.transitions.size();
    if (v > best_v) {
      best_v = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int baseline_highest_q(const std::vector<ActorCritic>& models,
                       const Dataset& data) {
  if (models.empty()) throw std::invalid_argument("highest_q: no models");
  if (data.transitions.empty())
    throw std::invalid_argument("highest_q: empty dataset");
  int best = 0;
  double best_v = -1e300;
  for (std::size_t i = 0; i < models.size(); ++i) {
    double acc = 0.0;
    for (const Transition& tr : data.transitions) {
      const std::vector<double> a = models[i].actor.forward(tr.s);
      std::vector<double> sa(tr.s);
      sa.insert(sa.end(), a.begin(), a.end());
      acc += models[i].critic.forward(sa)[0];
    }
    const double v = acc / data.transitions.size();
    if (v > best_v) {
      best_v = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

int baseline_random_ensemble(int arms, Rng& rng) {
  if (arms < 1) throw std::invalid_argument("random_ensemble: no models");
  return rng.uniform_int(arms);
}

}  // namespace orl
