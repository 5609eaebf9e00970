#pragma once

// Scripted task leaves for the pure-BT agent. Movement tasks follow grid
// paths that are re-planned every Blackboard::kRequeryInterval steps (or when
// the goal moves); Flee and Hide steer toward EQS-selected points refreshed
// on the same cadence.

#include "skirmish/arena.hpp"
#include "skirmish/btree.hpp"
#include "skirmish/eqs.hpp"
#include "skirmish/pathfind.hpp"

namespace skirmish::bt {

namespace detail {

constexpr double kWaypointReach = 60.0;
constexpr double kGoalDrift = 100.0;  // replan when the goal moved this far

inline ActionCommand follow_path(const WorldState& world, const AgentState& agent,
                                 Blackboard& bb, Vec2 goal) {
  // Track progress; being pinned in place means the current plan has wedged
  // the agent against geometry and needs replacing.
  if (distance(agent.position, bb.stall_anchor) > 2.0) {
    bb.stall_anchor = agent.position;
    bb.stall_steps = 0;
  } else {
    bb.stall_steps += 1;
  }
  bool stale = bb.path_step < 0 || world.step - bb.path_step >= Blackboard::kRequeryInterval ||
               bb.path_index >= bb.path.size() || distance(goal, bb.path_goal) > kGoalDrift;
  if (bb.stall_steps == 10) stale = true;
  if (stale) {
    bb.path = plan_path(world, agent.position, goal);
    bb.path_index = 0;
    bb.path_step = world.step;
    bb.path_goal = goal;
  }
  Vec2 waypoint = goal;  // unreachable goals fall back to straight-line steering
  if (!bb.path.empty()) {
    while (bb.path_index + 1 < bb.path.size() &&
           distance(agent.position, bb.path[bb.path_index]) < kWaypointReach) {
      ++bb.path_index;
    }
    waypoint = bb.path[bb.path_index];
  }
  Vec2 d = waypoint - agent.position;
  if (d.norm() < 1.0) return {};
  if (bb.stall_steps > 15) {
    // Still pinned after a replan: sidestep perpendicular to the desired
    // direction for a few steps (alternating sides is unnecessary; any
    // deterministic escape breaks the wedge).
    d = d.perp_ccw();
    if (bb.stall_steps > 30) bb.stall_steps = 0;
  }
  return world_dir_to_action(world, agent, d);
}

inline Vec2 eqs_goal(const WorldState& world, const AgentState& agent, Blackboard& bb,
                     TaskKind task, const EqsCriteria& criteria) {
  bool stale = bb.eqs_step < 0 || world.step - bb.eqs_step >= Blackboard::kRequeryInterval ||
               bb.eqs_task != task || !bb.eqs_point.has_value();
  if (stale) {
    int n = 1 + criteria.ring_points * static_cast<int>(criteria.ring_radii.size());
    bb.eqs_point = eqs_query(world, agent.id, criteria, n);
    bb.eqs_step = world.step;
    bb.eqs_task = task;
  }
  return *bb.eqs_point;
}

// Combat fires only when the shot will land: facing within 5 degrees of the
// target and the first thing along the firing line is the target itself.
// Ammo stations are excluded: projectiles fly through them.
inline bool combat_shot_lined_up(const WorldState& world, const AgentState& agent,
                                 const AgentState& target) {
  Vec2 to_target = target.position - agent.position;
  if (to_target.norm_sq() == 0.0) return false;
  if (std::abs(angle_between(agent.facing, to_target)) > deg_to_rad(5.0)) return false;
  RayMask mask;
  mask.ammo = false;
  auto hit = raycast(world, agent.position, agent.facing, 2.0 * world.config.diagonal(), mask,
                     agent.id);
  if (!hit || hit->category != HitCategory::Agent) return false;
  return world.agents[static_cast<std::size_t>(hit->index)].id == target.id;
}

}  // namespace detail

inline ActionCommand run_scripted_task(TaskKind kind, const WorldState& world, AgentId agent_id,
                                       Blackboard& bb) {
  const AgentState* agent = world.find_agent(agent_id);
  if (!agent) throw ArenaError("scripted task: no such agent");
  const AgentState* opp = opponent_of(world, *agent);

  switch (kind) {
    case TaskKind::Combat: {
      ActionCommand cmd;  // hold position, facing slews toward the target
      cmd.shoot = opp && opp->alive() && detail::combat_shot_lined_up(world, *agent, *opp);
      return cmd;
    }
    case TaskKind::Search: {
      Vec2 goal = bb.last_seen_target.value_or(opp ? opp->position : agent->position);
      return detail::follow_path(world, *agent, bb, goal);
    }
    case TaskKind::Flee:
      return detail::follow_path(world, *agent, bb,
                                 detail::eqs_goal(world, *agent, bb, kind, flee_criteria()));
    case TaskKind::Hide:
      return detail::follow_path(world, *agent, bb,
                                 detail::eqs_goal(world, *agent, bb, kind, hide_criteria()));
    case TaskKind::Collect: {
      const AmmoStation* nearest = nullptr;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : world.stations) {
        if (!s.available()) continue;
        double d = distance(agent->position, s.position);
        if (d < best) {
          best = d;
          nearest = &s;
        }
      }
      if (!nearest) return {};  // nothing to collect: hold position
      return detail::follow_path(world, *agent, bb, nearest->position);
    }
  }
  return {};
}

}  // namespace skirmish::bt
