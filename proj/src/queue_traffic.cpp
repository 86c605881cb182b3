#include "orl/queue_traffic.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace orl {

int queue_state(const QueueTrafficSpec& q, int q_ns, int q_ew, int phase) {
  const int side = q.max_queue + 1;
  return (q_ns * side + q_ew) * 2 + phase;
}

void queue_decode(const QueueTrafficSpec& q, int s, int& q_ns, int& q_ew,
                  int& phase) {
  const int side = q.max_queue + 1;
  phase = s % 2;
  s /= 2;
  q_ew = s % side;
  q_ns = s / side;
}

DiscreteMdp build_queue_traffic(const QueueTrafficSpec& q) {
  if (q.max_queue < 1 || q.discharge_rate < 0)
    throw std::invalid_argument("queue_traffic: bad queue parameters");
  if (q.arrival_ns < 0.0 || q.arrival_ns > 1.0 || q.arrival_ew < 0.0 ||
      q.arrival_ew > 1.0)
    throw std::invalid_argument("queue_traffic: arrival rates must be in [0,1]");

  const int side = q.max_queue + 1;
  const int n = side * side * 2;
  DiscreteMdp m = DiscreteMdp::empty(n, 2);
  m.gamma = q.gamma;
  m.horizon = q.horizon;

  for (int q_ns = 0; q_ns < side; ++q_ns) {
    for (int q_ew = 0; q_ew < side; ++q_ew) {
      for (int phase = 0; phase < 2; ++phase) {
        const int s = queue_state(q, q_ns, q_ew, phase);
        for (int a = 0; a < 2; ++a) {
          int d_ns = q_ns, d_ew = q_ew;
          if (a == 0)
            d_ns = std::max(0, q_ns - q.discharge_rate);
          else
            d_ew = std::max(0, q_ew - q.discharge_rate);
          std::map<int, double> dist;
          for (int arr_ns = 0; arr_ns < 2; ++arr_ns) {
            for (int arr_ew = 0; arr_ew < 2; ++arr_ew) {
              const double p =
                  (arr_ns ? q.arrival_ns : 1.0 - q.arrival_ns) *
                  (arr_ew ? q.arrival_ew : 1.0 - q.arrival_ew);
              if (p <= 0.0) continue;
              const int n_ns = std::min(q.max_queue, d_ns + arr_ns);
              const int n_ew = std::min(q.max_queue, d_ew + arr_ew);
              dist[queue_state(q, n_ns, n_ew, a)] += p;
            }
          }
          for (auto [next, p] : dist)
            if (p != 0.0) m.trans[s][a].push_back({next, p});
          m.r(s, a) = -static_cast<double>(q_ns + q_ew) / q.max_queue -
                      (a != phase ? q.switch_cost : 0.0);
        }
      }
    }
  }
  m.initial[queue_state(q, 0, 0, 0)] = 1.0;  // empty start, NS green
  m.validate();
  return m;
}

std::function<double(int, int)> switch_aversion_shaping(
    const QueueTrafficSpec& q, double extra_cost) {
  return [q, extra_cost](int s, int a) {
    int q_ns, q_ew, phase;
    queue_decode(q, s, q_ns, q_ew, phase);
    return a != phase ? -extra_cost : 0.0;
  };
}

}  // namespace orl
