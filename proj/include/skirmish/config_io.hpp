#pragma once

// Mapping between the typed configuration structs and flat ConfigMap keys,
// used by the CLI for config files, command-line overrides and resolved-
// config snapshots. Precedence is defaults < file < overrides; every run
// writes the fully resolved map next to its outputs.

#include <string>

#include "skirmish/harness.hpp"

namespace skirmish {

// ---------------------------------------------------------------------------
// ArenaConfig <-> "arena.*"

inline void arena_to_config(const ArenaConfig& a, ConfigMap& m, const std::string& p = "arena") {
  m.set(p + ".side", {a.side});
  m.set(p + ".tick_hz", {static_cast<std::int64_t>(a.tick_hz)});
  m.set(p + ".move_speed", {a.move_speed});
  m.set(p + ".projectile_speed", {a.projectile_speed});
  m.set(p + ".agent_radius", {a.agent_radius});
  m.set(p + ".station_radius", {a.station_radius});
  m.set(p + ".damage_per_hit", {static_cast<std::int64_t>(a.damage_per_hit)});
  m.set(p + ".fire_interval_s", {a.fire_interval_s});
  m.set(p + ".start_health", {static_cast<std::int64_t>(a.start_health)});
  m.set(p + ".start_ammo", {static_cast<std::int64_t>(a.start_ammo)});
  m.set(p + ".ammo_quantum", {static_cast<std::int64_t>(a.ammo_quantum)});
  m.set(p + ".station_respawn_steps", {static_cast<std::int64_t>(a.station_respawn_steps)});
  m.set(p + ".healthy_window", {static_cast<std::int64_t>(a.healthy_window)});
  m.set(p + ".facing_slew_deg_s", {a.facing_slew_deg_s});
  m.set(p + ".random_obstacles", {static_cast<std::int64_t>(a.random_obstacles)});
  m.set(p + ".random_obstacle_min", {ConfigArray{{a.random_obstacle_min.x}, {a.random_obstacle_min.y}}});
  m.set(p + ".random_obstacle_max", {ConfigArray{{a.random_obstacle_max.x}, {a.random_obstacle_max.y}}});
  m.set(p + ".random_stations", {static_cast<std::int64_t>(a.random_stations)});
  ConfigArray obstacles;
  for (const auto& o : a.obstacles) {
    obstacles.push_back({ConfigArray{{o.lo.x}, {o.lo.y}, {o.hi.x}, {o.hi.y}}});
  }
  m.set(p + ".obstacles", {obstacles});
  ConfigArray stations;
  for (const auto& s : a.stations) {
    stations.push_back({ConfigArray{{s.x}, {s.y}}});
  }
  m.set(p + ".stations", {stations});
  m.set(p + ".spawn_min_separation", {a.spawn.min_separation});
  if (std::isfinite(a.spawn.max_separation)) {
    m.set(p + ".spawn_max_separation", {a.spawn.max_separation});
  }
  m.set(p + ".spawn_require_no_los", {a.spawn.require_no_los});
  m.set(p + ".spawn_wall_margin", {a.spawn.wall_margin});
  m.set(p + ".spawn_max_attempts", {static_cast<std::int64_t>(a.spawn.max_attempts)});
}

// Reads "arena.*" keys over the provided defaults (missing keys keep them).
inline ArenaConfig arena_from_config(const ConfigMap& m, ArenaConfig a = {},
                                     const std::string& p = "arena") {
  a.side = m.get_double(p + ".side", a.side);
  a.tick_hz = static_cast<int>(m.get_int(p + ".tick_hz", a.tick_hz));
  a.move_speed = m.get_double(p + ".move_speed", a.move_speed);
  a.projectile_speed = m.get_double(p + ".projectile_speed", a.projectile_speed);
  a.agent_radius = m.get_double(p + ".agent_radius", a.agent_radius);
  a.station_radius = m.get_double(p + ".station_radius", a.station_radius);
  a.damage_per_hit = static_cast<int>(m.get_int(p + ".damage_per_hit", a.damage_per_hit));
  a.fire_interval_s = m.get_double(p + ".fire_interval_s", a.fire_interval_s);
  a.start_health = static_cast<int>(m.get_int(p + ".start_health", a.start_health));
  a.start_ammo = static_cast<int>(m.get_int(p + ".start_ammo", a.start_ammo));
  a.ammo_quantum = static_cast<int>(m.get_int(p + ".ammo_quantum", a.ammo_quantum));
  a.station_respawn_steps =
      static_cast<int>(m.get_int(p + ".station_respawn_steps", a.station_respawn_steps));
  a.healthy_window = static_cast<int>(m.get_int(p + ".healthy_window", a.healthy_window));
  a.facing_slew_deg_s = m.get_double(p + ".facing_slew_deg_s", a.facing_slew_deg_s);
  a.random_obstacles = static_cast<int>(m.get_int(p + ".random_obstacles", a.random_obstacles));
  a.random_stations = static_cast<int>(m.get_int(p + ".random_stations", a.random_stations));
  if (m.has(p + ".random_obstacle_min")) {
    const auto& v = m.at(p + ".random_obstacle_min").as_array();
    a.random_obstacle_min = {v.at(0).as_double(), v.at(1).as_double()};
  }
  if (m.has(p + ".random_obstacle_max")) {
    const auto& v = m.at(p + ".random_obstacle_max").as_array();
    a.random_obstacle_max = {v.at(0).as_double(), v.at(1).as_double()};
  }
  if (m.has(p + ".obstacles")) {
    a.obstacles.clear();
    for (const auto& o : m.at(p + ".obstacles").as_array()) {
      const auto& r = o.as_array();
      a.obstacles.push_back({{r.at(0).as_double(), r.at(1).as_double()},
                             {r.at(2).as_double(), r.at(3).as_double()}});
    }
  }
  if (m.has(p + ".stations")) {
    a.stations.clear();
    for (const auto& s : m.at(p + ".stations").as_array()) {
      const auto& v = s.as_array();
      a.stations.push_back({v.at(0).as_double(), v.at(1).as_double()});
    }
  }
  a.spawn.min_separation = m.get_double(p + ".spawn_min_separation", a.spawn.min_separation);
  if (m.has(p + ".spawn_max_separation")) {
    a.spawn.max_separation = m.get_double(p + ".spawn_max_separation", 0.0);
  }
  a.spawn.require_no_los = m.get_bool(p + ".spawn_require_no_los", a.spawn.require_no_los);
  a.spawn.wall_margin = m.get_double(p + ".spawn_wall_margin", a.spawn.wall_margin);
  a.spawn.max_attempts =
      static_cast<int>(m.get_int(p + ".spawn_max_attempts", a.spawn.max_attempts));
  return a;
}

// ---------------------------------------------------------------------------
// PpoConfig <-> "ppo.*"

inline void ppo_to_config(const PpoConfig& c, ConfigMap& m, const std::string& p = "ppo") {
  m.set(p + ".learning_rate", {c.learning_rate});
  m.set(p + ".gamma", {c.gamma});
  m.set(p + ".gae_lambda", {c.gae_lambda});
  m.set(p + ".clip", {c.clip});
  m.set(p + ".vf_coeff", {c.vf_coeff});
  m.set(p + ".vf_clip", {c.vf_clip});
  m.set(p + ".entropy_coeff", {c.entropy_coeff});
  m.set(p + ".kl_coeff", {c.kl_coeff});
  m.set(p + ".kl_target", {c.kl_target});
  m.set(p + ".train_batch", {static_cast<std::int64_t>(c.train_batch)});
  m.set(p + ".minibatch", {static_cast<std::int64_t>(c.minibatch)});
  m.set(p + ".epochs", {static_cast<std::int64_t>(c.epochs)});
  m.set(p + ".max_episode_steps", {static_cast<std::int64_t>(c.max_episode_steps)});
  m.set(p + ".total_steps", {static_cast<std::int64_t>(c.total_steps)});
  m.set(p + ".num_envs", {static_cast<std::int64_t>(c.num_envs)});
  m.set(p + ".checkpoint_every", {static_cast<std::int64_t>(c.checkpoint_every)});
  m.set(p + ".grad_clip", {c.grad_clip});
  m.set(p + ".adam_beta1", {c.adam_beta1});
  m.set(p + ".adam_beta2", {c.adam_beta2});
  m.set(p + ".adam_eps", {c.adam_eps});
}

inline PpoConfig ppo_from_config(const ConfigMap& m, PpoConfig c = {},
                                 const std::string& p = "ppo") {
  c.learning_rate = m.get_double(p + ".learning_rate", c.learning_rate);
  c.gamma = m.get_double(p + ".gamma", c.gamma);
  c.gae_lambda = m.get_double(p + ".gae_lambda", c.gae_lambda);
  c.clip = m.get_double(p + ".clip", c.clip);
  c.vf_coeff = m.get_double(p + ".vf_coeff", c.vf_coeff);
  c.vf_clip = m.get_double(p + ".vf_clip", c.vf_clip);
  c.entropy_coeff = m.get_double(p + ".entropy_coeff", c.entropy_coeff);
  c.kl_coeff = m.get_double(p + ".kl_coeff", c.kl_coeff);
  c.kl_target = m.get_double(p + ".kl_target", c.kl_target);
  c.train_batch = static_cast<int>(m.get_int(p + ".train_batch", c.train_batch));
  c.minibatch = static_cast<int>(m.get_int(p + ".minibatch", c.minibatch));
  c.epochs = static_cast<int>(m.get_int(p + ".epochs", c.epochs));
  c.max_episode_steps =
      static_cast<int>(m.get_int(p + ".max_episode_steps", c.max_episode_steps));
  c.total_steps = m.get_int(p + ".total_steps", c.total_steps);
  c.num_envs = static_cast<int>(m.get_int(p + ".num_envs", c.num_envs));
  c.checkpoint_every = static_cast<int>(m.get_int(p + ".checkpoint_every", c.checkpoint_every));
  c.grad_clip = m.get_double(p + ".grad_clip", c.grad_clip);
  c.adam_beta1 = m.get_double(p + ".adam_beta1", c.adam_beta1);
  c.adam_beta2 = m.get_double(p + ".adam_beta2", c.adam_beta2);
  c.adam_eps = m.get_double(p + ".adam_eps", c.adam_eps);
  return c;
}

// ---------------------------------------------------------------------------
// EnvSpec <-> "env.*" + "arena.*"

inline const char* opponent_name(OpponentKind k) {
  switch (k) {
    case OpponentKind::None: return "none";
    case OpponentKind::Chase: return "chase";
    case OpponentKind::ChaseShoot: return "chase-shoot";
    case OpponentKind::SentryShoot: return "sentry-shoot";
    case OpponentKind::AggressiveBT: return "aggressive-bt";
  }
  return "none";
}

inline OpponentKind opponent_from_name(const std::string& s) {
  for (OpponentKind k : {OpponentKind::None, OpponentKind::Chase, OpponentKind::ChaseShoot,
                         OpponentKind::SentryShoot, OpponentKind::AggressiveBT}) {
    if (s == opponent_name(k)) return k;
  }
  throw ConfigError("unknown opponent kind '" + s + "'");
}

inline const char* observation_set_name(ObservationSet s) {
  switch (s) {
    case ObservationSet::Core: return "core";
    case ObservationSet::CoreHide: return "core+hide";
    case ObservationSet::CoreCollect: return "core+collect";
    case ObservationSet::CoreHideCollect: return "core+hide+collect";
  }
  return "core";
}

inline ObservationSet observation_set_from_name(const std::string& s) {
  for (ObservationSet o : {ObservationSet::Core, ObservationSet::CoreHide,
                           ObservationSet::CoreCollect, ObservationSet::CoreHideCollect}) {
    if (s == observation_set_name(o)) return o;
  }
  throw ConfigError("unknown observation set '" + s + "'");
}

inline void env_spec_to_config(const EnvSpec& e, ConfigMap& m) {
  arena_to_config(e.arena, m);
  m.set("env.opponent", {std::string(opponent_name(e.opponent))});
  m.set("env.opponent_speed", {e.arena.agents.size() > 1 && e.arena.agents[1].move_speed > 0.0
                                   ? e.arena.agents[1].move_speed
                                   : e.arena.move_speed});
  m.set("env.observation", {std::string(observation_set_name(e.obs))});
  m.set("env.curriculum", {e.curriculum});
  m.set("env.phase", {static_cast<std::int64_t>(e.phase)});
  m.set("env.skill", {std::string(skill_name(e.skill))});
  m.set("env.flee_distance", {e.reward_params.flee_distance});
  m.set("env.max_episode_steps", {static_cast<std::int64_t>(e.max_episode_steps)});
  m.set("env.goal_station", {e.goal_station});
  m.set("env.max_ray_range", {e.sensors.max_ray_range});
  m.set("env.learner_locked", {!e.arena.agents.empty() && e.arena.agents[0].position_locked});
  m.set("env.learner_unlimited_ammo",
        {!e.arena.agents.empty() && e.arena.agents[0].unlimited_ammo});
  m.set("env.opponent_locked", {e.arena.agents.size() > 1 && e.arena.agents[1].position_locked});
  m.set("env.opponent_unlimited_ammo",
        {e.arena.agents.size() > 1 && e.arena.agents[1].unlimited_ammo});
}

inline EnvSpec env_spec_from_config(const ConfigMap& m, EnvSpec e = {}) {
  e.arena = arena_from_config(m, e.arena);
  e.arena.agents.resize(2);
  if (m.has("env.opponent")) e.opponent = opponent_from_name(m.at("env.opponent").as_string());
  if (m.has("env.opponent_speed")) {
    e.arena.agents[1].move_speed = m.at("env.opponent_speed").as_double();
  }
  if (m.has("env.observation")) {
    e.obs = observation_set_from_name(m.at("env.observation").as_string());
  }
  e.curriculum = m.get_bool("env.curriculum", e.curriculum);
  e.phase = static_cast<int>(m.get_int("env.phase", e.phase));
  if (m.has("env.skill")) e.skill = skill_from_name(m.at("env.skill").as_string());
  e.reward_params.flee_distance =
      m.get_double("env.flee_distance", e.reward_params.flee_distance);
  e.max_episode_steps =
      static_cast<int>(m.get_int("env.max_episode_steps", e.max_episode_steps));
  e.goal_station = m.get_bool("env.goal_station", e.goal_station);
  e.sensors.max_ray_range = m.get_double("env.max_ray_range", e.sensors.max_ray_range);
  e.arena.agents[0].position_locked =
      m.get_bool("env.learner_locked", e.arena.agents[0].position_locked);
  e.arena.agents[0].unlimited_ammo =
      m.get_bool("env.learner_unlimited_ammo", e.arena.agents[0].unlimited_ammo);
  e.arena.agents[1].position_locked =
      m.get_bool("env.opponent_locked", e.arena.agents[1].position_locked);
  e.arena.agents[1].unlimited_ammo =
      m.get_bool("env.opponent_unlimited_ammo", e.arena.agents[1].unlimited_ammo);
  return e;
}

}  // namespace skirmish
