#pragma once

// Deterministic fixed-timestep 2D arena simulation: movement, projectiles,
// damage, ammunition, raycasting and line of sight.
//
// Determinism contract: for a fixed (config, seed, action stream) the state
// sequence is bit-identical. Everything runs in a fixed order — agents by
// index, projectiles by list order, stations by index — and all randomness
// flows through the world's own generator. step() applies its phases in this
// order: movement, facing slew, firing, projectile advance, ammo pickup,
// timer decrement, step counter, event bookkeeping.

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirmish/config.hpp"
#include "skirmish/geom.hpp"
#include "skirmish/rng.hpp"

namespace skirmish {

using AgentId = int;

class ArenaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One agent's per-step intent. Axes are interpreted in the agent's
// target-relative frame: forward = unit vector toward its designated target,
// lateral = the clockwise perpendicular. The combined vector is clamped to
// unit norm before scaling by the move speed.
struct ActionCommand {
  double lateral = 0.0;
  double forward = 0.0;
  bool shoot = false;
};

struct AgentSpawnSpec {
  int team = 0;
  double move_speed = -1.0;  // <0: use config default
  bool unlimited_ammo = false;
  bool position_locked = false;
};

struct SpawnRules {
  double min_separation = 0.0;
  double max_separation = std::numeric_limits<double>::infinity();
  bool require_no_los = false;  // reject spawns where any pair has line of sight
  double wall_margin = 100.0;
  int max_attempts = 1000;
};

struct ArenaConfig {
  double side = 4000.0;
  int tick_hz = 30;
  double move_speed = 600.0;
  double projectile_speed = 2000.0;
  double agent_radius = 50.0;
  double station_radius = 50.0;
  int damage_per_hit = 10;
  double fire_interval_s = 0.15;
  int start_health = 100;
  int start_ammo = 10;
  int ammo_quantum = 10;
  int station_respawn_steps = 300;
  int healthy_window = 90;
  double facing_slew_deg_s = 180.0;

  std::vector<Rect> obstacles;  // fixed layout
  int random_obstacles = 0;
  Vec2 random_obstacle_min{100.0, 100.0};  // width/height bounds for random boxes
  Vec2 random_obstacle_max{400.0, 400.0};

  std::vector<Vec2> stations;  // fixed layout
  int random_stations = 0;

  std::vector<AgentSpawnSpec> agents{AgentSpawnSpec{0}, AgentSpawnSpec{1}};
  SpawnRules spawn;

  double dt() const { return 1.0 / static_cast<double>(tick_hz); }
  int fire_cooldown_steps() const {
    return static_cast<int>(std::ceil(fire_interval_s * tick_hz - 1e-12));
  }
  double diagonal() const { return side * std::sqrt(2.0); }
};

// Tracks the minimum health over the trailing W steps with a monotonic queue.
class HealthWindow {
 public:
  void reset(int window, long step, int health) {
    window_ = window;
    entries_.clear();
    entries_.push_back({step, health});
  }

  void push(long step, int health) {
    while (!entries_.empty() && entries_.back().health >= health) entries_.pop_back();
    entries_.push_back({step, health});
    while (!entries_.empty() && entries_.front().step <= step - window_) entries_.pop_front();
  }

  int min() const { return entries_.empty() ? 0 : entries_.front().health; }
  int window() const { return window_; }

 private:
  struct Entry {
    long step;
    int health;
  };
  int window_ = 90;
  std::deque<Entry> entries_;
};

struct AgentState {
  AgentId id = 0;
  int team = 0;
  Vec2 position;
  Vec2 facing{1.0, 0.0};
  int health = 100;
  int ammo = 10;
  int cooldown = 0;
  int damage_dealt = 0;
  AgentId target = -1;
  double move_speed = 600.0;
  bool unlimited_ammo = false;
  bool position_locked = false;
  HealthWindow health_window;

  bool alive() const { return health > 0; }
  int health_history_min() const { return health_window.min(); }
};

struct Projectile {
  Vec2 position;
  Vec2 velocity;
  AgentId owner = -1;
};

struct AmmoStation {
  Vec2 position;
  int respawn_timer = 0;  // 0 = available

  bool available() const { return respawn_timer == 0; }
};

struct AgentEvents {
  int wall_collisions = 0;
  int shots_fired = 0;
  int hits_landed = 0;
  int hits_taken = 0;
  int kills = 0;
  int ammo_pickups = 0;
  int picked_station = -1;             // station index, -1 if none
  std::vector<AgentId> hit_victims;    // one entry per hit landed
  bool died = false;
  double distance_to_target = std::numeric_limits<double>::infinity();
  bool sees_target = false;
};

struct StepEvents {
  std::vector<AgentEvents> agents;               // by agent index
  std::vector<std::uint8_t> in_sight;            // row-major n*n, [i*n+j] = LOS(i, j)

  bool pair_in_sight(std::size_t i, std::size_t j) const {
    std::size_t n = agents.size();
    return in_sight[i * n + j] != 0;
  }
};

struct WorldState {
  ArenaConfig config;
  long step = 0;
  std::vector<AgentState> agents;
  std::vector<Projectile> projectiles;
  std::vector<Rect> obstacles;  // resolved: fixed + randomly placed
  std::vector<AmmoStation> stations;
  Rng rng;

  const AgentState* find_agent(AgentId id) const {
    for (const auto& a : agents)
      if (a.id == id) return &a;
    return nullptr;
  }
  AgentState* find_agent(AgentId id) {
    for (auto& a : agents)
      if (a.id == id) return &a;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Raycasting

enum class HitCategory : std::uint8_t { Wall, Obstacle, Agent, Ammo };

struct RayMask {
  bool wall = true;
  bool obstacle = true;
  bool agent = true;
  bool ammo = true;

  static RayMask all() { return {}; }
  static RayMask obstacles_only() { return {false, true, false, false}; }
  static RayMask blockers() { return {true, true, false, false}; }
};

struct RayHit {
  double distance = 0.0;
  HitCategory category = HitCategory::Wall;
  int index = -1;  // obstacle/agent/station index, -1 for walls
};

// Nearest intersection along origin + t*direction, t in (0, max_dist].
// `direction` must be unit length. Agent discs belonging to `exclude_agent`
// or to dead agents are ignored; only available ammo stations register.
inline std::optional<RayHit> raycast(const WorldState& world, Vec2 origin, Vec2 direction,
                                     double max_dist, RayMask mask = RayMask::all(),
                                     AgentId exclude_agent = -1) {
  std::optional<RayHit> best;
  auto consider = [&](double t, HitCategory cat, int idx) {
    if (t <= 0.0 || t > max_dist) return;
    if (!best || t < best->distance) best = RayHit{t, cat, idx};
  };

  if (mask.wall) {
    Rect bounds{{0.0, 0.0}, {world.config.side, world.config.side}};
    if (auto t = ray_rect_first_hit(origin, direction, bounds)) {
      consider(*t, HitCategory::Wall, -1);
    }
  }
  if (mask.obstacle) {
    for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
      if (auto t = ray_rect_first_hit(origin, direction, world.obstacles[i])) {
        consider(*t, HitCategory::Obstacle, static_cast<int>(i));
      }
    }
  }
  if (mask.agent) {
    for (std::size_t i = 0; i < world.agents.size(); ++i) {
      const auto& a = world.agents[i];
      if (!a.alive() || a.id == exclude_agent) continue;
      if (auto t = ray_circle_first_hit(origin, direction, a.position,
                                        world.config.agent_radius)) {
        consider(*t, HitCategory::Agent, static_cast<int>(i));
      }
    }
  }
  if (mask.ammo) {
    for (std::size_t i = 0; i < world.stations.size(); ++i) {
      if (!world.stations[i].available()) continue;
      if (auto t = ray_circle_first_hit(origin, direction, world.stations[i].position,
                                        world.config.station_radius)) {
        consider(*t, HitCategory::Ammo, static_cast<int>(i));
      }
    }
  }
  return best;
}

// True iff the open segment a-b crosses no obstacle interior. Grazing an
// obstacle edge or corner does not block sight. Symmetric by construction:
// the endpoints are ordered canonically before testing.
inline bool line_of_sight(const WorldState& world, Vec2 a, Vec2 b) {
  if (a == b) return true;
  if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
  for (const auto& r : world.obstacles) {
    if (segment_crosses_rect_interior(a, b, r)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Spawning

namespace detail {

inline bool inside_any_obstacle(const std::vector<Rect>& obstacles, Vec2 p, double inflate) {
  for (const auto& r : obstacles) {
    if (r.inflated(inflate).contains_strict(p)) return true;
  }
  return false;
}

}  // namespace detail

// Builds a fresh world from (config, seed). Identical inputs yield
// bit-identical worlds. Throws ArenaError when rejection sampling cannot
// satisfy the spawn constraints within spawn.max_attempts tries.
inline WorldState spawn_episode(const ArenaConfig& config, std::uint64_t seed) {
  if (config.side <= 0.0 || config.tick_hz <= 0) throw ArenaError("invalid arena dimensions");
  WorldState world;
  world.config = config;
  world.rng = Rng(seed);
  world.step = 0;

  const double side = config.side;
  Rect bounds{{0.0, 0.0}, {side, side}};

  for (const auto& r : config.obstacles) {
    if (!(r.lo.x < r.hi.x && r.lo.y < r.hi.y)) throw ArenaError("obstacle min must be < max");
    if (!bounds.contains(r.lo) || !bounds.contains(r.hi)) {
      throw ArenaError("obstacle outside arena");
    }
    world.obstacles.push_back(r);
  }
  for (int i = 0; i < config.random_obstacles; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < config.spawn.max_attempts; ++attempt) {
      double w = world.rng.uniform(config.random_obstacle_min.x, config.random_obstacle_max.x);
      double h = world.rng.uniform(config.random_obstacle_min.y, config.random_obstacle_max.y);
      double margin = config.spawn.wall_margin;
      if (w >= side - 2.0 * margin || h >= side - 2.0 * margin) continue;
      double x = world.rng.uniform(margin, side - margin - w);
      double y = world.rng.uniform(margin, side - margin - h);
      Rect r{{x, y}, {x + w, y + h}};
      // Keep fixed stations reachable.
      bool covers_station = false;
      double keepout = config.station_radius + config.agent_radius;
      for (const auto& s : config.stations) {
        if (r.inflated(keepout).contains(s)) covers_station = true;
      }
      if (covers_station) continue;
      world.obstacles.push_back(r);
      placed = true;
      break;
    }
    if (!placed) throw ArenaError("could not place random obstacle (over-constrained config)");
  }

  auto station_ok = [&](Vec2 p) {
    if (p.x < config.station_radius || p.x > side - config.station_radius ||
        p.y < config.station_radius || p.y > side - config.station_radius) {
      return false;
    }
    return !detail::inside_any_obstacle(world.obstacles, p,
                                        config.station_radius + config.agent_radius);
  };
  for (const auto& p : config.stations) {
    if (!station_ok(p)) throw ArenaError("fixed ammo station blocked or outside arena");
    world.stations.push_back({p, 0});
  }
  for (int i = 0; i < config.random_stations; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < config.spawn.max_attempts; ++attempt) {
      Vec2 p{world.rng.uniform(config.spawn.wall_margin, side - config.spawn.wall_margin),
             world.rng.uniform(config.spawn.wall_margin, side - config.spawn.wall_margin)};
      if (!station_ok(p)) continue;
      world.stations.push_back({p, 0});
      placed = true;
      break;
    }
    if (!placed) throw ArenaError("could not place random ammo station");
  }

  // Agents: rejection-sample positions honoring obstacle clearance, the
  // separation band, and the no-initial-LOS rule.
  const double r = config.agent_radius;
  const double lo = std::max(r, config.spawn.wall_margin);
  const double hi = side - lo;
  if (lo >= hi) throw ArenaError("arena too small for agent spawn margin");
  for (std::size_t i = 0; i < config.agents.size(); ++i) {
    const auto& spec = config.agents[i];
    bool placed = false;
    for (int attempt = 0; attempt < config.spawn.max_attempts; ++attempt) {
      Vec2 p{world.rng.uniform(lo, hi), world.rng.uniform(lo, hi)};
      if (detail::inside_any_obstacle(world.obstacles, p, r)) continue;
      bool ok = true;
      for (const auto& other : world.agents) {
        double d = distance(p, other.position);
        if (d < config.spawn.min_separation || d > config.spawn.max_separation) ok = false;
      }
      if (ok && config.spawn.require_no_los) {
        for (const auto& other : world.agents) {
          if (line_of_sight(world, p, other.position)) ok = false;
        }
      }
      if (!ok) continue;
      AgentState a;
      a.id = static_cast<AgentId>(i);
      a.team = spec.team;
      a.position = p;
      double theta = world.rng.uniform(0.0, 2.0 * kPi);
      a.facing = {std::cos(theta), std::sin(theta)};
      a.health = config.start_health;
      a.ammo = config.start_ammo;
      a.cooldown = 0;
      a.move_speed = spec.move_speed > 0.0 ? spec.move_speed : config.move_speed;
      a.unlimited_ammo = spec.unlimited_ammo;
      a.position_locked = spec.position_locked;
      a.health_window.reset(config.healthy_window, 0, a.health);
      world.agents.push_back(a);
      placed = true;
      break;
    }
    if (!placed) {
      throw ArenaError("could not place agent " + std::to_string(i) +
                       " (over-constrained spawn rules)");
    }
  }

  // Default target assignment: next agent cyclically. A solo world targets
  // itself, which keeps controllers and sensors well-defined in benchmarks.
  std::size_t n = world.agents.size();
  for (std::size_t i = 0; i < n; ++i) {
    world.agents[i].target = world.agents[(i + 1) % n].id;
  }
  return world;
}

// ---------------------------------------------------------------------------
// Stepping

namespace detail {

// Axis-separated move with clamping gives slide-along-surface behavior for
// axis-aligned geometry. Obstacle pushes move the coordinate monotonically
// back toward its (valid) starting value, so iterating to a fixpoint
// terminates; a final revert guards against pathological overlaps.
// Returns true if any axis was clipped.
inline bool move_with_collisions(const WorldState& world, Vec2& pos, Vec2 delta) {
  const double r = world.config.agent_radius;
  const double side = world.config.side;
  bool clipped = false;

  auto resolve_axis = [&](double& coord, double d, bool is_x, double other) {
    const double start = coord;
    double target = coord + d;
    double clamped = std::clamp(target, r, side - r);
    if (clamped != target) clipped = true;
    target = clamped;
    auto inside = [&](double c) {
      Vec2 probe = is_x ? Vec2{c, other} : Vec2{other, c};
      for (const auto& o : world.obstacles) {
        Rect inf = o.inflated(r);
        if (inf.contains_strict(probe)) return &o;
      }
      return static_cast<const Rect*>(nullptr);
    };
    for (std::size_t pass = 0; pass <= world.obstacles.size(); ++pass) {
      const Rect* o = inside(target);
      if (!o) break;
      clipped = true;
      Rect inf = o->inflated(r);
      double lo = is_x ? inf.lo.x : inf.lo.y;
      double hi = is_x ? inf.hi.x : inf.hi.y;
      target = d > 0.0 ? lo : hi;
    }
    if (inside(target)) target = start;
    coord = target;
  };

  if (delta.x != 0.0) resolve_axis(pos.x, delta.x, true, pos.y);
  if (delta.y != 0.0) resolve_axis(pos.y, delta.y, false, pos.x);
  return clipped;
}

inline Vec2 slew_facing(Vec2 facing, Vec2 desired, double max_radians) {
  if (desired.norm_sq() == 0.0) return facing;
  desired = desired.normalized();
  double ang = angle_between(facing, desired);
  if (std::abs(ang) <= max_radians) return desired;
  return facing.rotated(ang > 0.0 ? max_radians : -max_radians).normalized();
}

}  // namespace detail

// Movement frame of an agent: forward points at its designated target (or
// along its facing when it has none), lateral is the clockwise perpendicular.
inline void movement_frame(const WorldState& world, const AgentState& agent, Vec2& forward,
                           Vec2& lateral) {
  forward = agent.facing;
  if (const AgentState* t = world.find_agent(agent.target); t && t->id != agent.id) {
    Vec2 d = t->position - agent.position;
    if (d.norm_sq() > 0.0) forward = d.normalized();
  }
  lateral = forward.perp_cw();
}

// Converts a desired world-space direction into action axes for this agent.
inline ActionCommand world_dir_to_action(const WorldState& world, const AgentState& agent,
                                         Vec2 world_dir, bool shoot = false) {
  Vec2 fwd, lat;
  movement_frame(world, agent, fwd, lat);
  Vec2 d = world_dir.normalized();
  ActionCommand cmd;
  cmd.forward = d.dot(fwd);
  cmd.lateral = d.dot(lat);
  cmd.shoot = shoot;
  return cmd;
}

// Advances the world by one fixed timestep. Every live agent must have an
// action entry; dead agents ignore theirs. Throws on unknown ids or
// non-finite action axes.
inline StepEvents step(WorldState& world, const std::map<AgentId, ActionCommand>& actions) {
  const ArenaConfig& cfg = world.config;
  const double dt = cfg.dt();
  const std::size_t n = world.agents.size();

  for (const auto& [id, cmd] : actions) {
    if (!world.find_agent(id)) throw ArenaError("action for unknown agent id " + std::to_string(id));
    if (!std::isfinite(cmd.lateral) || !std::isfinite(cmd.forward)) {
      throw ArenaError("non-finite action axes for agent " + std::to_string(id));
    }
  }

  StepEvents events;
  events.agents.resize(n);

  // Movement.
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = world.agents[i];
    if (!a.alive()) continue;
    auto it = actions.find(a.id);
    if (it == actions.end()) throw ArenaError("missing action for live agent " + std::to_string(a.id));
    if (a.position_locked) continue;
    const ActionCommand& cmd = it->second;
    double lat = std::clamp(cmd.lateral, -1.0, 1.0);
    double fwd = std::clamp(cmd.forward, -1.0, 1.0);
    double norm = std::sqrt(lat * lat + fwd * fwd);
    if (norm > 1.0) {
      lat /= norm;
      fwd /= norm;
    }
    if (lat == 0.0 && fwd == 0.0) continue;
    Vec2 f, l;
    movement_frame(world, a, f, l);
    Vec2 delta = (f * fwd + l * lat) * (a.move_speed * dt);
    if (detail::move_with_collisions(world, a.position, delta)) {
      events.agents[i].wall_collisions += 1;
    }
  }

  // Facing slews toward the target.
  const double max_slew = deg_to_rad(cfg.facing_slew_deg_s) * dt;
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = world.agents[i];
    if (!a.alive()) continue;
    if (const AgentState* t = world.find_agent(a.target); t && t->id != a.id) {
      a.facing = detail::slew_facing(a.facing, t->position - a.position, max_slew);
    }
  }

  // Firing.
  const int cooldown_steps = cfg.fire_cooldown_steps();
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = world.agents[i];
    if (!a.alive()) continue;
    const ActionCommand& cmd = actions.at(a.id);
    if (!cmd.shoot || a.cooldown > 0) continue;
    if (!a.unlimited_ammo && a.ammo <= 0) continue;
    world.projectiles.push_back({a.position, a.facing * cfg.projectile_speed, a.id});
    if (!a.unlimited_ammo) a.ammo -= 1;
    a.cooldown = cooldown_steps;
    events.agents[i].shots_fired += 1;
  }

  // Projectiles: swept-segment collision against obstacles, walls and agent
  // discs (never the owner). Earliest hit wins; ties resolve agent first,
  // then obstacle, then wall, then lowest index.
  {
    std::vector<Projectile> survivors;
    survivors.reserve(world.projectiles.size());
    Rect bounds{{0.0, 0.0}, {cfg.side, cfg.side}};
    for (const auto& p : world.projectiles) {
      Vec2 to = p.position + p.velocity * dt;
      struct Candidate {
        double t;
        int priority;
        int index;
      };
      std::optional<Candidate> hit;
      auto consider = [&](double t, int priority, int index) {
        if (t < 0.0 || t > 1.0) return;
        if (!hit || t < hit->t ||
            (t == hit->t && (priority < hit->priority ||
                             (priority == hit->priority && index < hit->index)))) {
          hit = Candidate{t, priority, index};
        }
      };
      for (std::size_t ai = 0; ai < n; ++ai) {
        const AgentState& a = world.agents[ai];
        if (!a.alive() || a.id == p.owner) continue;
        if (auto t = segment_circle_first_hit(p.position, to, a.position, cfg.agent_radius)) {
          consider(*t, 0, static_cast<int>(ai));
        }
      }
      for (std::size_t oi = 0; oi < world.obstacles.size(); ++oi) {
        Vec2 d = to - p.position;
        if (auto t = ray_rect_first_hit(p.position, d, world.obstacles[oi])) {
          consider(*t, 1, static_cast<int>(oi));
        }
      }
      {
        // Leaving the arena: the exit point through the boundary.
        Vec2 d = to - p.position;
        if (auto t = ray_rect_first_hit(p.position, d, bounds)) {
          if (*t > 0.0) consider(*t, 2, 0);
        }
        if (!bounds.contains(to)) consider(1.0, 2, 1);
      }
      if (hit && hit->priority == 0) {
        AgentState& victim = world.agents[static_cast<std::size_t>(hit->index)];
        int dealt = std::min(cfg.damage_per_hit, victim.health);
        victim.health -= dealt;
        std::size_t vi = static_cast<std::size_t>(hit->index);
        events.agents[vi].hits_taken += 1;
        if (AgentState* shooter = world.find_agent(p.owner)) {
          shooter->damage_dealt += dealt;
          std::size_t si = static_cast<std::size_t>(shooter - world.agents.data());
          events.agents[si].hits_landed += 1;
          events.agents[si].hit_victims.push_back(victim.id);
          if (!victim.alive()) events.agents[si].kills += 1;
        }
        if (!victim.alive()) events.agents[vi].died = true;
        continue;  // projectile removed
      }
      if (hit) continue;  // absorbed by obstacle or wall
      survivors.push_back({to, p.velocity, p.owner});
    }
    world.projectiles = std::move(survivors);
  }

  // Ammo pickups: first agent in index order wins a contested station.
  for (std::size_t i = 0; i < n; ++i) {
    AgentState& a = world.agents[i];
    if (!a.alive() || a.unlimited_ammo) continue;
    for (std::size_t si = 0; si < world.stations.size(); ++si) {
      AmmoStation& s = world.stations[si];
      if (!s.available()) continue;
      if (distance(a.position, s.position) > cfg.agent_radius + cfg.station_radius) continue;
      a.ammo += cfg.ammo_quantum;
      s.respawn_timer = cfg.station_respawn_steps;
      events.agents[i].ammo_pickups += 1;
      events.agents[i].picked_station = static_cast<int>(si);
      break;
    }
  }

  // Timers.
  for (auto& a : world.agents) {
    if (a.cooldown > 0) a.cooldown -= 1;
  }
  for (auto& s : world.stations) {
    if (s.respawn_timer > 0) s.respawn_timer -= 1;
  }

  world.step += 1;
  for (auto& a : world.agents) {
    a.health_window.push(world.step, a.health);
  }

  // Event bookkeeping for reward functions and conditions.
  events.in_sight.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        events.in_sight[i * n + j] = 1;
        continue;
      }
      events.in_sight[i * n + j] =
          line_of_sight(world, world.agents[i].position, world.agents[j].position) ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = world.agents[i];
    if (const AgentState* t = world.find_agent(a.target); t && t->id != a.id) {
      events.agents[i].distance_to_target = distance(a.position, t->position);
      std::size_t ti = static_cast<std::size_t>(t - world.agents.data());
      events.agents[i].sees_target = events.in_sight[i * n + ti] != 0;
    } else {
      events.agents[i].distance_to_target = 0.0;
      events.agents[i].sees_target = true;
    }
  }
  return events;
}

}  // namespace skirmish
