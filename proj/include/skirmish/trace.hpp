#pragma once

// Canonical world-state serialization. Doubles are written as raw bit
// patterns (hex), so the text round-trips exactly and hashing it gives a
// bit-level determinism check. The same format backs replay traces and the
// world portion of training checkpoints.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <sstream>
#include <string>

#include "skirmish/arena.hpp"
#include "skirmish/config.hpp"

namespace skirmish {

inline std::string double_bits(double v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

inline double bits_double(const std::string& s) {
  return std::bit_cast<double>(static_cast<std::uint64_t>(std::stoull(s, nullptr, 16)));
}

// One-step snapshot in a stable field order. `include_rng` adds the
// generator state (needed for checkpoint restore, skipped in trace hashing
// where the re-simulated state already covers it).
inline void append_world_text(const WorldState& w, std::string& out, bool include_rng = false) {
  std::ostringstream os;
  os << "world " << w.step << ' ' << w.agents.size() << ' ' << w.projectiles.size() << ' '
     << w.obstacles.size() << ' ' << w.stations.size() << ' ' << double_bits(w.config.side)
     << '\n';
  for (const auto& a : w.agents) {
    os << "agent " << a.id << ' ' << a.team << ' ' << double_bits(a.position.x) << ' '
       << double_bits(a.position.y) << ' ' << double_bits(a.facing.x) << ' '
       << double_bits(a.facing.y) << ' ' << a.health << ' ' << a.ammo << ' ' << a.cooldown << ' '
       << a.health_history_min() << ' ' << a.damage_dealt << ' ' << a.target << '\n';
  }
  for (const auto& p : w.projectiles) {
    os << "proj " << p.owner << ' ' << double_bits(p.position.x) << ' '
       << double_bits(p.position.y) << ' ' << double_bits(p.velocity.x) << ' '
       << double_bits(p.velocity.y) << '\n';
  }
  for (const auto& o : w.obstacles) {
    os << "obst " << double_bits(o.lo.x) << ' ' << double_bits(o.lo.y) << ' '
       << double_bits(o.hi.x) << ' ' << double_bits(o.hi.y) << '\n';
  }
  for (const auto& s : w.stations) {
    os << "stat " << double_bits(s.position.x) << ' ' << double_bits(s.position.y) << ' '
       << s.respawn_timer << '\n';
  }
  if (include_rng) {
    os << "rng " << w.rng << '\n';
  }
  out += os.str();
}

inline std::string serialize_world(const WorldState& w, bool include_rng = false) {
  std::string out;
  append_world_text(w, out, include_rng);
  return out;
}

inline std::uint64_t world_hash(const WorldState& w) { return fnv1a(serialize_world(w)); }

// Full-fidelity restore of a snapshot written with include_rng = true.
// The caller supplies the config (worlds never own their config history);
// the agent health windows are re-seeded at the restored health, which is
// exact for checkpoints taken at episode boundaries.
inline WorldState parse_world_text(std::istream& in, const ArenaConfig& config) {
  WorldState w;
  w.config = config;
  std::string tag;
  if (!(in >> tag) || tag != "world") throw ArenaError("world snapshot: missing 'world' header");
  std::size_t n_agents, n_proj, n_obst, n_stat;
  std::string side_bits;
  in >> w.step >> n_agents >> n_proj >> n_obst >> n_stat >> side_bits;
  w.config.side = bits_double(side_bits);
  for (std::size_t i = 0; i < n_agents; ++i) {
    in >> tag;
    if (tag != "agent") throw ArenaError("world snapshot: expected agent record");
    AgentState a;
    std::string px, py, fx, fy;
    int hist_min = 0;
    in >> a.id >> a.team >> px >> py >> fx >> fy >> a.health >> a.ammo >> a.cooldown >>
        hist_min >> a.damage_dealt >> a.target;
    a.position = {bits_double(px), bits_double(py)};
    a.facing = {bits_double(fx), bits_double(fy)};
    if (static_cast<std::size_t>(a.id) < config.agents.size()) {
      const auto& spec = config.agents[static_cast<std::size_t>(a.id)];
      a.move_speed = spec.move_speed > 0.0 ? spec.move_speed : config.move_speed;
      a.unlimited_ammo = spec.unlimited_ammo;
      a.position_locked = spec.position_locked;
    } else {
      a.move_speed = config.move_speed;
    }
    a.health_window.reset(config.healthy_window, w.step, std::min(a.health, hist_min));
    w.agents.push_back(a);
  }
  for (std::size_t i = 0; i < n_proj; ++i) {
    in >> tag;
    if (tag != "proj") throw ArenaError("world snapshot: expected proj record");
    Projectile p;
    std::string px, py, vx, vy;
    in >> p.owner >> px >> py >> vx >> vy;
    p.position = {bits_double(px), bits_double(py)};
    p.velocity = {bits_double(vx), bits_double(vy)};
    w.projectiles.push_back(p);
  }
  for (std::size_t i = 0; i < n_obst; ++i) {
    in >> tag;
    if (tag != "obst") throw ArenaError("world snapshot: expected obst record");
    std::string a, b, c, d;
    in >> a >> b >> c >> d;
    w.obstacles.push_back({{bits_double(a), bits_double(b)}, {bits_double(c), bits_double(d)}});
  }
  for (std::size_t i = 0; i < n_stat; ++i) {
    in >> tag;
    if (tag != "stat") throw ArenaError("world snapshot: expected stat record");
    AmmoStation s;
    std::string px, py;
    in >> px >> py >> s.respawn_timer;
    s.position = {bits_double(px), bits_double(py)};
    w.stations.push_back(s);
  }
  if (in >> tag && tag == "rng") {
    in >> w.rng;
  }
  return w;
}

}  // namespace skirmish
