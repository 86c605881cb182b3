#pragma once

#include <utility>
#include <vector>

#include "orl/discrete_mdp.hpp"

namespace orl {

// Slippery gridworld. Actions: 0 = up, 1 = right, 2 = down, 3 = left.
// With probability slip_prob the agent moves to one of the two perpendicular
// directions (half each); moves into walls stay put. The goal cell is
// absorbing. Rewards are functions of (s, a): hazard and goal bonuses enter
// as their expected value under the transition kernel.
struct GridWorldSpec {
  int width = 5, height = 5;
  int start_x = 0, start_y = 0;
  bool uniform_start = false;  // uniform over non-goal cells instead
  int goal_x = 4, goal_y = 0;
  std::vector<std::pair<int, int>> hazards;
  double slip_prob = 0.1;
  double step_reward = -0.01;
  double goal_reward = 1.0;
  double hazard_penalty = -0.05;
  double gamma = 0.95;
  int horizon = 50;
};

int grid_state(const GridWorldSpec& g, int x, int y);

DiscreteMdp build_gridworld(const GridWorldSpec& g);

std::vector<std::uint8_t> gridworld_hazard_mask(const GridWorldSpec& g);

// The default grid5 environment: a hazard corridor at x = 2 (rows 0..3) with
// a gap at the top. The cheapest path from (0,0) to the goal (4,0) crosses
// the corridor; an expert shaped against hazards detours through the gap,
// which manufactures the model-vs-expert disagreement.
GridWorldSpec grid5_default();

}  // namespace orl
