#pragma once

#include "orl/discrete_mdp.hpp"

namespace orl {

// Single-intersection signal control. State = (queue NS, queue EW, phase);
// actions: 0 = green for NS, 1 = green for EW. Each step the green queue
// discharges up to discharge_rate vehicles, then Bernoulli arrivals land in
// both queues (capped at max_queue). Reward is -(q_ns + q_ew)/max_queue with
// a switch cost when the phase changes.
struct QueueTrafficSpec {
  double arrival_ns = 0.3, arrival_ew = 0.3;
  int max_queue = 20;
  int discharge_rate = 2;
  double switch_cost = 0.05;
  double gamma = 0.95;
  int horizon = 200;
};

int queue_state(const QueueTrafficSpec& q, int q_ns, int q_ew, int phase);
void queue_decode(const QueueTrafficSpec& q, int s, int& q_ns, int& q_ew,
                  int& phase);

DiscreteMdp build_queue_traffic(const QueueTrafficSpec& q);

// Extra switch penalty; shaping experts toward steadier signal plans.
std::function<double(int, int)> switch_aversion_shaping(
    const QueueTrafficSpec& q, double extra_cost);

}  // namespace orl
