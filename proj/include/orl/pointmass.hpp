#pragma once

#include <array>

#include "orl/rng.hpp"

namespace orl {

using Vec2 = std::array<double, 2>;

// Linear point mass: state (position, velocity), scalar action in
// [action_lo, action_hi], dynamics s' = A s + B clip(a) + noise. Quadratic
// cost, no terminal states; episodes truncate at the horizon.
struct PointMassSpec {
  double a11 = 1.0, a12 = 0.1, a21 = 0.0, a22 = 0.95;
  double b1 = 0.0, b2 = 0.1;
  double noise_std = 0.01;
  double action_lo = -1.0, action_hi = 1.0;
  double state_cost = 1.0, action_cost = 0.01;
  double gamma = 0.99;
  int horizon = 100;
  double init_pos = 1.0, init_vel = 0.5;  // uniform in [-init_pos, init_pos] etc.
};

// Deliberately sluggish stabilizing feedback a = clip(-k1*pos - k2*vel);
// the gap to the cost-optimal aggressive controller is what the expert
// disagrees with deployed models about.
struct LinearGain {
  double k1 = 0.4, k2 = 0.6;
};

double pm_clip(const PointMassSpec& p, double a);

Vec2 pm_reset(const PointMassSpec& p, Rng& rng);

struct PmStep {
  Vec2 next;
  double reward = 0.0;
};

PmStep pm_step(const PointMassSpec& p, const Vec2& s, double a, Rng& rng);

double expert_action(const PointMassSpec& p, const LinearGain& k, const Vec2& s);

// Spectral radius of A - B K; the expert gain must keep this below 1.
double closed_loop_spectral_radius(const PointMassSpec& p, const LinearGain& k);

}  // namespace orl
