#pragma once

// Grid path planning for scripted movement. The arena is rasterized into an
// occupancy grid (100 u cells by default); a cell is blocked when its center
// lies inside an obstacle inflated by the agent radius plus a clearance
// margin, or within that distance of a wall. The margin keeps waypoints off
// exact collision boundaries, where axis-aligned sliding degenerates. Paths
// are shortest 8-connected routes (diagonal cost sqrt 2, no corner cutting
// past a blocked orthogonal neighbor), found with A* and deterministic
// tie-breaking. The cells containing the start and a physically valid goal
// are treated as walkable even when the margin blocks them.

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "skirmish/arena.hpp"

namespace skirmish {

struct OccupancyGrid {
  double cell = 100.0;
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> blocked;

  bool in_bounds(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
  bool is_blocked(int ix, int iy) const {
    return !in_bounds(ix, iy) || blocked[static_cast<std::size_t>(iy) * nx + ix] != 0;
  }
  Vec2 center(int ix, int iy) const { return {(ix + 0.5) * cell, (iy + 0.5) * cell}; }
  int cell_x(Vec2 p) const {
    return std::clamp(static_cast<int>(std::floor(p.x / cell)), 0, nx - 1);
  }
  int cell_y(Vec2 p) const {
    return std::clamp(static_cast<int>(std::floor(p.y / cell)), 0, ny - 1);
  }
};

constexpr double kGridClearance = 25.0;

inline OccupancyGrid build_occupancy_grid(const WorldState& world, double cell = 100.0,
                                          double clearance = kGridClearance) {
  OccupancyGrid g;
  g.cell = cell;
  g.nx = std::max(1, static_cast<int>(std::ceil(world.config.side / cell)));
  g.ny = g.nx;
  g.blocked.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
  const double r = world.config.agent_radius + clearance;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      Vec2 c = g.center(ix, iy);
      bool b = c.x < r || c.x > world.config.side - r || c.y < r || c.y > world.config.side - r;
      if (!b) b = detail::inside_any_obstacle(world.obstacles, c, r);
      if (b) g.blocked[static_cast<std::size_t>(iy) * g.nx + ix] = 1;
    }
  }
  return g;
}

namespace detail {

// True when the straight corridor from a to b keeps agent-radius clearance.
inline bool corridor_clear(const WorldState& world, Vec2 a, Vec2 b) {
  const double r = world.config.agent_radius;
  if (a.x < r || a.x > world.config.side - r || a.y < r || a.y > world.config.side - r ||
      b.x < r || b.x > world.config.side - r || b.y < r || b.y > world.config.side - r) {
    return false;
  }
  for (const auto& o : world.obstacles) {
    if (segment_intersects_rect(a, b, o.inflated(r))) return false;
  }
  return true;
}

}  // namespace detail

// Shortest 8-connected grid path between the cells containing `from` and
// `to`, returned as world-space waypoints bracketed by the exact endpoints.
// A clear straight corridor short-circuits to {from, to}. Returns an empty
// path when the goal cell is blocked (e.g. inside an obstacle) or
// unreachable. The start cell is treated as walkable: the agent is standing
// there.
inline std::vector<Vec2> plan_path(const WorldState& world, Vec2 from, Vec2 to,
                                   double cell = 100.0) {
  if (detail::corridor_clear(world, from, to)) return {from, to};

  OccupancyGrid g = build_occupancy_grid(world, cell);
  int sx = g.cell_x(from), sy = g.cell_y(from);
  int tx = g.cell_x(to), ty = g.cell_y(to);
  const double r = world.config.agent_radius;
  bool goal_valid = !detail::inside_any_obstacle(world.obstacles, to, r) && to.x >= r &&
                    to.x <= world.config.side - r && to.y >= r && to.y <= world.config.side - r;
  if (!goal_valid) return {};
  // The agent stands on the start cell and the goal point is valid, so the
  // clearance margin does not apply to either endpoint cell.
  g.blocked[static_cast<std::size_t>(sy) * g.nx + sx] = 0;
  g.blocked[static_cast<std::size_t>(ty) * g.nx + tx] = 0;
  if (sx == tx && sy == ty) return {from, to};

  const int n = g.nx * g.ny;
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(n), kInf);
  std::vector<int> prev(static_cast<std::size_t>(n), -1);
  auto idx = [&](int x, int y) { return y * g.nx + x; };
  auto heuristic = [&](int x, int y) {
    double dx = std::abs(x - tx), dy = std::abs(y - ty);
    return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
  };

  struct QEntry {
    double f;
    double h;
    int node;
    bool operator>(const QEntry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return node > o.node;
    }
  };
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> open;
  dist[static_cast<std::size_t>(idx(sx, sy))] = 0.0;
  open.push({heuristic(sx, sy), heuristic(sx, sy), idx(sx, sy)});

  const int dxs[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  const int dys[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const double kSqrt2 = std::sqrt(2.0);
  int goal = idx(tx, ty);
  while (!open.empty()) {
    QEntry e = open.top();
    open.pop();
    int node = e.node;
    int x = node % g.nx, y = node / g.nx;
    double d = dist[static_cast<std::size_t>(node)];
    if (e.f > d + heuristic(x, y)) continue;  // stale entry
    if (node == goal) break;
    for (int k = 0; k < 8; ++k) {
      int nxp = x + dxs[k], nyp = y + dys[k];
      if (g.is_blocked(nxp, nyp)) continue;
      if (k >= 4) {
        // No squeezing diagonally past a blocked orthogonal neighbor.
        if (g.is_blocked(x + dxs[k], y) || g.is_blocked(x, y + dys[k])) continue;
      }
      double nd = d + (k < 4 ? 1.0 : kSqrt2);
      std::size_t ni = static_cast<std::size_t>(idx(nxp, nyp));
      if (nd < dist[ni] - 1e-12) {
        dist[ni] = nd;
        prev[ni] = node;
        open.push({nd + heuristic(nxp, nyp), heuristic(nxp, nyp), idx(nxp, nyp)});
      }
    }
  }
  if (dist[static_cast<std::size_t>(goal)] == kInf) return {};

  std::vector<Vec2> path;
  for (int node = goal; node != -1; node = prev[static_cast<std::size_t>(node)]) {
    path.push_back(g.center(node % g.nx, node / g.nx));
  }
  std::reverse(path.begin(), path.end());
  path.front() = from;
  path.back() = to;
  return path;
}

}  // namespace skirmish
