#pragma once

// Environment-query-style point selection for the scripted Flee and Hide
// tasks. A fixed candidate pattern (the agent's position, then rings of 32
// points at increasing radii) is scored with a weighted sum of features and
// the best valid candidate wins, lowest index breaking ties. Scores are
// linear in the weights, so scaling all weights by a positive constant never
// changes the winner.

#include <vector>

#include "skirmish/arena.hpp"

namespace skirmish {

struct EqsCriteria {
  double w_player_distance = 1.0;  // + distance from candidate to the player
  double w_wall_penalty = 1.0;     // - max(0, wall_margin - distance to wall)
  double w_occlusion_bonus = 0.0;  // + occlusion_unit when player has no LOS
  double wall_margin = 300.0;
  double occlusion_unit = 10000.0;  // dominates any distance term in a 4000 u arena
  std::vector<double> ring_radii{400.0, 800.0, 1200.0};
  int ring_points = 32;
};

inline EqsCriteria flee_criteria() { return {}; }

inline EqsCriteria hide_criteria() {
  EqsCriteria c;
  c.w_occlusion_bonus = 1.0;
  return c;
}

// Candidate pattern around `around`, in deterministic order.
inline std::vector<Vec2> eqs_candidates(const EqsCriteria& c, Vec2 around) {
  std::vector<Vec2> out;
  out.push_back(around);
  for (double r : c.ring_radii) {
    for (int k = 0; k < c.ring_points; ++k) {
      double theta = 2.0 * kPi * k / c.ring_points;
      out.push_back(around + Vec2{r * std::cos(theta), r * std::sin(theta)});
    }
  }
  return out;
}

inline bool eqs_candidate_valid(const WorldState& world, Vec2 p) {
  const double r = world.config.agent_radius;
  if (p.x < r || p.x > world.config.side - r || p.y < r || p.y > world.config.side - r) {
    return false;
  }
  return !detail::inside_any_obstacle(world.obstacles, p, r);
}

inline double eqs_score(const WorldState& world, const EqsCriteria& c, Vec2 candidate,
                        Vec2 player) {
  double wall_dist = std::min({candidate.x, world.config.side - candidate.x, candidate.y,
                               world.config.side - candidate.y});
  double score = c.w_player_distance * distance(candidate, player);
  score -= c.w_wall_penalty * std::max(0.0, c.wall_margin - wall_dist);
  if (c.w_occlusion_bonus != 0.0 && !line_of_sight(world, player, candidate)) {
    score += c.w_occlusion_bonus * c.occlusion_unit;
  }
  return score;
}

// Best of the first `n_samples` candidates; the agent's own position when
// every candidate is invalid. The player is the agent's designated target;
// with none designated, the agent's position scores as the player position.
inline Vec2 eqs_query(const WorldState& world, AgentId agent_id, const EqsCriteria& criteria,
                      int n_samples) {
  const AgentState* agent = world.find_agent(agent_id);
  if (!agent) throw ArenaError("eqs_query: no such agent");
  Vec2 player = agent->position;
  if (const AgentState* t = world.find_agent(agent->target); t && t->id != agent->id) {
    player = t->position;
  }
  std::vector<Vec2> candidates = eqs_candidates(criteria, agent->position);
  std::size_t limit = std::min<std::size_t>(candidates.size(),
                                            n_samples < 1 ? 1 : static_cast<std::size_t>(n_samples));
  bool found = false;
  Vec2 best_point = agent->position;
  double best_score = 0.0;
  for (std::size_t i = 0; i < limit; ++i) {
    if (!eqs_candidate_valid(world, candidates[i])) continue;
    double s = eqs_score(world, criteria, candidates[i], player);
    if (!found || s > best_score) {
      found = true;
      best_score = s;
      best_point = candidates[i];
    }
  }
  return best_point;
}

}  // namespace skirmish
