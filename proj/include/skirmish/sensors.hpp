#pragma once

// Observation encoding. Each skill model sees a fixed-width vector built
// from three blocks:
//   core    — 36 typed rays (distance + {target, obstacle, ammo} one-hot),
//             health fraction, ammo fraction, direction to target; width 148
//   hide    — player-sees-agent flag, normalized distance to the first
//             blocker toward the player; width 2
//   collect — direction and normalized distance to the nearest available
//             ammo station; width 3
//
// Rays are cast in the agent's facing frame (ray 0 along facing, then
// counterclockwise in 10 degree increments), so the ray block is invariant
// under rigid rotations of world + agent. Directions are expressed in the
// facing frame as (along-facing, ccw-perpendicular) components. Encoders are
// pure functions of the world state.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirmish/arena.hpp"

namespace skirmish {

class SensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kNumRays = 36;
constexpr int kRayBlockWidth = kNumRays * 4;
constexpr int kCoreObservationWidth = kRayBlockWidth + 4;  // 148
constexpr int kHideAuxWidth = 2;
constexpr int kCollectAuxWidth = 3;

struct SensorConfig {
  double max_ray_range = 2000.0;
};

namespace detail {

inline const AgentState& require_agent(const WorldState& world, AgentId id) {
  const AgentState* a = world.find_agent(id);
  if (!a) throw SensorError("no such agent: " + std::to_string(id));
  return *a;
}

inline const AgentState& require_target(const WorldState& world, const AgentState& agent) {
  const AgentState* t = world.find_agent(agent.target);
  if (!t) throw SensorError("agent " + std::to_string(agent.id) + " has no designated target");
  return *t;
}

// Components of d in the agent's facing frame: (along facing, ccw perp).
inline Vec2 to_facing_frame(const AgentState& agent, Vec2 d) {
  return {d.dot(agent.facing), d.dot(agent.facing.perp_ccw())};
}

}  // namespace detail

// Core block: [ray0 dist, ray0 target, ray0 obstacle, ray0 ammo, ray1 ...,
// health_frac, ammo_frac, dir_fwd, dir_lat]. No-hit rays encode distance 1.0
// with a zero one-hot; arena walls count as obstacles.
inline void encode_core(const WorldState& world, AgentId agent_id, const SensorConfig& cfg,
                        Eigen::Ref<Eigen::VectorXd> out) {
  const AgentState& agent = detail::require_agent(world, agent_id);
  const AgentState& target = detail::require_target(world, agent);
  const double range = cfg.max_ray_range;

  for (int k = 0; k < kNumRays; ++k) {
    Vec2 dir = agent.facing.rotated(deg_to_rad(10.0 * k));
    auto hit = raycast(world, agent.position, dir, range, RayMask::all(), agent.id);
    double dist = 1.0;
    double one_hot[3] = {0.0, 0.0, 0.0};
    if (hit) {
      dist = hit->distance / range;
      switch (hit->category) {
        case HitCategory::Agent: one_hot[0] = 1.0; break;
        case HitCategory::Obstacle:
        case HitCategory::Wall: one_hot[1] = 1.0; break;
        case HitCategory::Ammo: one_hot[2] = 1.0; break;
      }
    }
    out[k * 4 + 0] = dist;
    out[k * 4 + 1] = one_hot[0];
    out[k * 4 + 2] = one_hot[1];
    out[k * 4 + 3] = one_hot[2];
  }

  const auto& cfgw = world.config;
  out[kRayBlockWidth + 0] = std::clamp(agent.health / static_cast<double>(cfgw.start_health), 0.0, 1.0);
  out[kRayBlockWidth + 1] =
      std::clamp(agent.ammo / static_cast<double>(std::max(1, cfgw.start_ammo)), 0.0, 1.0);
  Vec2 dir{0.0, 0.0};
  if (target.id != agent.id) {
    Vec2 d = target.position - agent.position;
    if (d.norm_sq() > 0.0) dir = detail::to_facing_frame(agent, d.normalized());
  }
  out[kRayBlockWidth + 2] = dir.x;
  out[kRayBlockWidth + 3] = dir.y;
}

// Hide auxiliary block: whether the player can see the agent, plus the
// distance to the first obstacle toward the player as a fraction of the
// player distance (1.0 when nothing blocks before the player). An agent
// sharing the player's position encodes (1, 1.0).
inline void encode_hide_aux(const WorldState& world, AgentId agent_id,
                            Eigen::Ref<Eigen::VectorXd> out) {
  const AgentState& agent = detail::require_agent(world, agent_id);
  const AgentState& player = detail::require_target(world, agent);
  Vec2 d = player.position - agent.position;
  double dist = d.norm();
  if (player.id == agent.id || dist == 0.0) {
    out[0] = 1.0;
    out[1] = 1.0;
    return;
  }
  out[0] = line_of_sight(world, player.position, agent.position) ? 1.0 : 0.0;
  auto hit = raycast(world, agent.position, d / dist, dist, RayMask::obstacles_only(), agent.id);
  out[1] = hit ? std::clamp(hit->distance / dist, 0.0, 1.0) : 1.0;
}

// Collect auxiliary block: facing-frame direction and diagonal-normalized
// distance to the nearest available station; (0, 0, 1.0) when none is.
inline void encode_collect_aux(const WorldState& world, AgentId agent_id,
                               Eigen::Ref<Eigen::VectorXd> out) {
  const AgentState& agent = detail::require_agent(world, agent_id);
  const AmmoStation* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : world.stations) {
    if (!s.available()) continue;
    double d = distance(agent.position, s.position);
    if (d < best) {
      best = d;
      nearest = &s;
    }
  }
  if (!nearest) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = 1.0;
    return;
  }
  Vec2 dir{0.0, 0.0};
  if (best > 0.0) {
    dir = detail::to_facing_frame(agent, (nearest->position - agent.position) / best);
  }
  out[0] = dir.x;
  out[1] = dir.y;
  out[2] = std::clamp(best / world.config.diagonal(), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Layout schema, so saved models stay interpretable.

struct ObservationField {
  std::string name;
  int offset;
  int width;
};

inline std::vector<ObservationField> core_schema(int base = 0) {
  std::vector<ObservationField> f;
  for (int k = 0; k < kNumRays; ++k) {
    f.push_back({"ray" + std::to_string(k) + ".distance", base + k * 4, 1});
    f.push_back({"ray" + std::to_string(k) + ".hit_onehot", base + k * 4 + 1, 3});
  }
  f.push_back({"health_frac", base + kRayBlockWidth, 1});
  f.push_back({"ammo_frac", base + kRayBlockWidth + 1, 1});
  f.push_back({"dir_to_target", base + kRayBlockWidth + 2, 2});
  return f;
}

inline std::vector<ObservationField> hide_aux_schema(int base) {
  return {{"player_sees_agent", base, 1}, {"frac_dist_to_block", base + 1, 1}};
}

inline std::vector<ObservationField> collect_aux_schema(int base) {
  return {{"dir_to_ammo", base, 2}, {"dist_to_ammo", base + 2, 1}};
}

inline std::string schema_to_text(const std::vector<ObservationField>& fields) {
  std::string out = "field offset width\n";
  for (const auto& f : fields) {
    out += f.name + " " + std::to_string(f.offset) + " " + std::to_string(f.width) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-model observation composition: every model sees the core block,
// some append the hide and/or collect auxiliary blocks.

enum class ObservationSet : std::uint8_t { Core, CoreHide, CoreCollect, CoreHideCollect };

inline int observation_width(ObservationSet set) {
  switch (set) {
    case ObservationSet::Core: return kCoreObservationWidth;
    case ObservationSet::CoreHide: return kCoreObservationWidth + kHideAuxWidth;
    case ObservationSet::CoreCollect: return kCoreObservationWidth + kCollectAuxWidth;
    case ObservationSet::CoreHideCollect:
      return kCoreObservationWidth + kHideAuxWidth + kCollectAuxWidth;
  }
  return kCoreObservationWidth;
}

inline Eigen::VectorXd encode_observation(ObservationSet set, const WorldState& world,
                                          AgentId agent_id, const SensorConfig& cfg) {
  Eigen::VectorXd out(observation_width(set));
  encode_core(world, agent_id, cfg, out.head(kCoreObservationWidth));
  int at = kCoreObservationWidth;
  if (set == ObservationSet::CoreHide || set == ObservationSet::CoreHideCollect) {
    encode_hide_aux(world, agent_id, out.segment(at, kHideAuxWidth));
    at += kHideAuxWidth;
  }
  if (set == ObservationSet::CoreCollect || set == ObservationSet::CoreHideCollect) {
    encode_collect_aux(world, agent_id, out.segment(at, kCollectAuxWidth));
  }
  return out;
}

inline std::vector<ObservationField> observation_schema(ObservationSet set) {
  std::vector<ObservationField> fields = core_schema();
  int at = kCoreObservationWidth;
  if (set == ObservationSet::CoreHide || set == ObservationSet::CoreHideCollect) {
    for (auto& f : hide_aux_schema(at)) fields.push_back(f);
    at += kHideAuxWidth;
  }
  if (set == ObservationSet::CoreCollect || set == ObservationSet::CoreHideCollect) {
    for (auto& f : collect_aux_schema(at)) fields.push_back(f);
  }
  return fields;
}

}  // namespace skirmish
