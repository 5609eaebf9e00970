#pragma once

// Per-agent controllers: scripted opponents, behavior-tree agents (scripted
// or with policy task leaves), and single-policy agents. A controller owns
// all per-agent state (blackboard, observation windows) and is reset at
// episode boundaries. Policy-driven controllers act deterministically (mean
// action, shoot at probability > 0.5) unless given a sampling stream.

#include <map>
#include <memory>
#include <optional>

#include "skirmish/btree.hpp"
#include "skirmish/policy.hpp"
#include "skirmish/sensors.hpp"
#include "skirmish/tasks.hpp"
#include "skirmish/trace.hpp"

namespace skirmish {

class Controller {
 public:
  virtual ~Controller() = default;
  virtual void reset() {}
  virtual ActionCommand act(const WorldState& world, AgentId id) = 0;
  virtual const bt::TickTrace* last_trace() const { return nullptr; }
  virtual void save_state(std::ostream&) const {}
  virtual void load_state(std::istream&) {}
};

// Does not move nor attack.
class StaticController : public Controller {
 public:
  ActionCommand act(const WorldState&, AgentId) override { return {}; }
};

// Runs straight at its target; optionally fires whenever it has line of
// sight (the arena cooldown paces the shots).
class ChaseController : public Controller {
 public:
  explicit ChaseController(bool shoot_on_sight = false) : shoot_(shoot_on_sight) {}

  ActionCommand act(const WorldState& world, AgentId id) override {
    const AgentState* agent = world.find_agent(id);
    if (!agent) return {};
    ActionCommand cmd;
    cmd.forward = 1.0;  // the movement frame already points at the target
    if (shoot_) cmd.shoot = sees_target(world, *agent);
    return cmd;
  }

 protected:
  static bool sees_target(const WorldState& world, const AgentState& agent) {
    const AgentState* t = bt::opponent_of(world, agent);
    return t && t->alive() && line_of_sight(world, agent.position, t->position);
  }

 private:
  bool shoot_;
};

// Holds position and fires on sight.
class SentryController : public Controller {
 public:
  ActionCommand act(const WorldState& world, AgentId id) override {
    const AgentState* agent = world.find_agent(id);
    ActionCommand cmd;
    if (agent) {
      const AgentState* t = bt::opponent_of(world, *agent);
      cmd.shoot = t && t->alive() && line_of_sight(world, agent->position, t->position);
    }
    return cmd;
  }
};

namespace detail {

inline void write_opt_vec2(std::ostream& os, const std::optional<Vec2>& v) {
  if (v) {
    os << "1 " << double_bits(v->x) << ' ' << double_bits(v->y);
  } else {
    os << "0 0 0";
  }
}

inline std::optional<Vec2> read_opt_vec2(std::istream& is) {
  int has = 0;
  std::string a, b;
  is >> has >> a >> b;
  if (!has) return std::nullopt;
  return Vec2{bits_double(a), bits_double(b)};
}

inline void save_blackboard(std::ostream& os, const bt::Blackboard& bb) {
  os << "bb ";
  write_opt_vec2(os, bb.last_seen_target);
  os << ' ' << bb.last_seen_step << ' ';
  write_opt_vec2(os, bb.eqs_point);
  os << ' ' << bb.eqs_step << ' ' << static_cast<int>(bb.eqs_task) << ' ' << bb.path.size()
     << ' ' << bb.path_index << ' ' << bb.path_step << ' ' << double_bits(bb.path_goal.x) << ' '
     << double_bits(bb.path_goal.y) << ' ' << double_bits(bb.stall_anchor.x) << ' '
     << double_bits(bb.stall_anchor.y) << ' ' << bb.stall_steps;
  for (const auto& p : bb.path) {
    os << ' ' << double_bits(p.x) << ' ' << double_bits(p.y);
  }
  os << '\n';
}

inline void load_blackboard(std::istream& is, bt::Blackboard& bb) {
  std::string tag;
  is >> tag;
  if (tag != "bb") throw ArenaError("bad blackboard state");
  bb.last_seen_target = read_opt_vec2(is);
  is >> bb.last_seen_step;
  bb.eqs_point = read_opt_vec2(is);
  int task = 0;
  std::size_t path_size = 0;
  std::string gx, gy, ax, ay;
  is >> bb.eqs_step >> task >> path_size >> bb.path_index >> bb.path_step >> gx >> gy >> ax >>
      ay >> bb.stall_steps;
  bb.eqs_task = static_cast<bt::TaskKind>(task);
  bb.path_goal = {bits_double(gx), bits_double(gy)};
  bb.stall_anchor = {bits_double(ax), bits_double(ay)};
  bb.path.clear();
  for (std::size_t i = 0; i < path_size; ++i) {
    std::string a, b;
    is >> a >> b;
    bb.path.push_back({bits_double(a), bits_double(b)});
  }
}

}  // namespace detail

// Behavior-tree agent. Task leaves run scripted routines unless a policy is
// installed for that task kind, in which case the leaf encodes its
// observation set, advances its own observation window, and acts from the
// network. The hybrid and pure-BT agents differ only in installed leaves.
class BTController : public Controller {
 public:
  explicit BTController(bt::BehaviorTree tree, const SensorConfig& sensors = {})
      : tree_(std::move(tree)), sensors_(sensors) {}

  void install_policy(bt::TaskKind task, const NetworkSpec& spec, PolicyParams<float> params,
                      ObservationSet obs) {
    auto leaf = std::make_unique<PolicyLeaf>();
    leaf->spec = spec;
    leaf->params = std::move(params);
    leaf->obs = obs;
    leaf->runtime = std::make_unique<PolicyRuntime<float>>(&leaf->params);
    leaves_[task] = std::move(leaf);
  }

  void reset() override {
    blackboard_ = bt::Blackboard{};
    for (auto& [kind, leaf] : leaves_) leaf->runtime->reset();
    trace_ = bt::TickTrace{};
  }

  ActionCommand act(const WorldState& world, AgentId id) override {
    bt::observe(world, id, blackboard_);
    auto runner = [this](bt::TaskKind kind, const WorldState& w, AgentId agent,
                         bt::Blackboard& bb) -> ActionCommand {
      auto it = leaves_.find(kind);
      if (it == leaves_.end()) return bt::run_scripted_task(kind, w, agent, bb);
      PolicyLeaf& leaf = *it->second;
      Eigen::VectorXd obs = encode_observation(leaf.obs, w, agent, sensors_);
      PolicyOutput<float> out = leaf.runtime->observe(obs.cast<float>());
      return deterministic_action(out);
    };
    bt::TickResult r = bt::tick(tree_, blackboard_, world, id, runner);
    trace_ = std::move(r.trace);
    return r.action;
  }

  const bt::TickTrace* last_trace() const override { return &trace_; }
  const bt::BehaviorTree& tree() const { return tree_; }

  void save_state(std::ostream& os) const override {
    detail::save_blackboard(os, blackboard_);
  }
  void load_state(std::istream& is) override { detail::load_blackboard(is, blackboard_); }

 private:
  struct PolicyLeaf {
    NetworkSpec spec;
    PolicyParams<float> params;
    ObservationSet obs = ObservationSet::Core;
    std::unique_ptr<PolicyRuntime<float>> runtime;
  };

  bt::BehaviorTree tree_;
  SensorConfig sensors_;
  bt::Blackboard blackboard_;
  std::map<bt::TaskKind, std::unique_ptr<PolicyLeaf>> leaves_;
  bt::TickTrace trace_;
};

// Single policy queried every step (the curriculum agent).
class PolicyController : public Controller {
 public:
  PolicyController(const NetworkSpec& spec, PolicyParams<float> params, ObservationSet obs,
                   const SensorConfig& sensors = {})
      : spec_(spec),
        params_(std::move(params)),
        obs_(obs),
        sensors_(sensors),
        runtime_(std::make_unique<PolicyRuntime<float>>(&params_)) {}

  void reset() override { runtime_->reset(); }

  ActionCommand act(const WorldState& world, AgentId id) override {
    Eigen::VectorXd obs = encode_observation(obs_, world, id, sensors_);
    PolicyOutput<float> out = runtime_->observe(obs.cast<float>());
    return deterministic_action(out);
  }

 private:
  NetworkSpec spec_;
  PolicyParams<float> params_;
  ObservationSet obs_;
  SensorConfig sensors_;
  std::unique_ptr<PolicyRuntime<float>> runtime_;
};

}  // namespace skirmish
