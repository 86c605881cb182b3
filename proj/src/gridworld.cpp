#include "orl/gridworld.hpp"

#include <map>
#include <stdexcept>

namespace orl {

namespace {

constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {1, 0, -1, 0};

}  // namespace

int grid_state(const GridWorldSpec& g, int x, int y) { return y * g.width + x; }

std::vector<std::uint8_t> gridworld_hazard_mask(const GridWorldSpec& g) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.width) * g.height, 0);
  for (auto [x, y] : g.hazards) mask[grid_state(g, x, y)] = 1;
  return mask;
}

DiscreteMdp build_gridworld(const GridWorldSpec& g) {
  if (g.slip_prob < 0.0 || g.slip_prob >= 1.0)
    throw std::invalid_argument("gridworld: slip_prob must be in [0,1)");
  for (auto [x, y] : g.hazards) {
    if (x < 0 || x >= g.width || y < 0 || y >= g.height)
      throw std::invalid_argument("gridworld: hazard out of bounds");
    if (x == g.goal_x && y == g.goal_y)
      throw std::invalid_argument("gridworld: goal cell cannot be a hazard");
  }
  if (g.goal_x < 0 || g.goal_x >= g.width || g.goal_y < 0 || g.goal_y >= g.height)
    throw std::invalid_argument("gridworld: goal out of bounds");

  const int n = g.width * g.height;
  DiscreteMdp m = DiscreteMdp::empty(n, 4);
  m.gamma = g.gamma;
  m.horizon = g.horizon;
  const int goal = grid_state(g, g.goal_x, g.goal_y);
  m.terminal[goal] = 1;
  const auto hazard = gridworld_hazard_mask(g);

  auto move = [&](int x, int y, int dir) {
    int nx = x + kDx[dir], ny = y + kDy[dir];
    if (nx < 0 || nx >= g.width || ny < 0 || ny >= g.height) return grid_state(g, x, y);
    return grid_state(g, nx, ny);
  };

  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const int s = grid_state(g, x, y);
      for (int a = 0; a < 4; ++a) {
        std::map<int, double> dist;
        if (s == goal) {
          dist[s] = 1.0;  // absorbing
        } else {
          dist[move(x, y, a)] += 1.0 - g.slip_prob;
          dist[move(x, y, (a + 1) % 4)] += g.slip_prob / 2.0;
          dist[move(x, y, (a + 3) % 4)] += g.slip_prob / 2.0;
        }
        double bonus = 0.0;
        for (auto [next, p] : dist) {
          if (p == 0.0) continue;
          m.trans[s][a].push_back({next, p});
          if (s != goal) {
            if (next == goal) bonus += p * g.goal_reward;
            if (hazard[next]) bonus += p * g.hazard_penalty;
          }
        }
        m.r(s, a) = (s == goal ? 0.0 : g.step_reward + bonus);
      }
    }
  }

  m.entry_bonus.assign(n, 0.0);
  m.entry_bonus[goal] = g.goal_reward;
  for (int s = 0; s < n; ++s)
    if (hazard[s]) m.entry_bonus[s] += g.hazard_penalty;

  if (g.uniform_start) {
    int count = 0;
    for (int s = 0; s < n; ++s)
      if (s != goal) ++count;
    for (int s = 0; s < n; ++s)
      if (s != goal) m.initial[s] = 1.0 / count;
  } else {
    m.initial[grid_state(g, g.start_x, g.start_y)] = 1.0;
  }
  m.validate();
  return m;
}

GridWorldSpec grid5_default() {
  GridWorldSpec g;
  g.width = 5;
  g.height = 5;
  g.start_x = 0;
  g.start_y = 0;
  g.goal_x = 4;
  g.goal_y = 0;
  g.hazards = {{2, 0}, {2, 1}, {2, 2}, {2, 3}};
  g.slip_prob = 0.1;
  g.step_reward = -0.01;
  g.goal_reward = 1.0;
  g.hazard_penalty = -0.05;
  g.gamma = 0.95;
  g.horizon = 50;
  return g;
}

}  // namespace orl
