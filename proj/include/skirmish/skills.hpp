#pragma once

// The five skill-training environments, their reward functions and terminal
// conditions, and the five-phase curriculum. Reward constants are exact
// table values; reward components arising in the same step are summed, and
// the episode-step cap truncates without any terminal bonus.
//
//   Flee     +0.001/step;                       -1.0* when player distance < 1000
//   Advance  -0.001/step, -0.01/wall collision; +1.0* when player in sight
//   Combat   -0.001/step, +0.1/hit landed;      +1.0* when the player dies
//   Hide     +0.001/step;                       -1.0* when player in sight
//   Collect  -0.001/step, -0.01/wall collision,
//            -0.1/hit taken;                    +1.0* on a successful reload
//
// Curriculum phases (one policy, superset observation, trained in order):
//   1 Combat   +1.0/shot landed, -0.01/wall, -0.1/shot taken (unlimited ammo)
//   2 Advance  same rewards, advance-style environment
//   3 Move     adds +5.0 move-when-empty (once per depletion), -0.01/step
//   4 Survival +1.0/shot landed, -0.01/wall, -10.0* death, -0.001/step
//   5 Strategy phase 4 plus hiding spots and ammo pickups

#include <filesystem>
#include <fstream>
#include <memory>

#include "skirmish/controllers.hpp"
#include "skirmish/ppo.hpp"

namespace skirmish {

enum class Skill : std::uint8_t { Flee, Advance, Combat, Hide, Collect };

inline const char* skill_name(Skill s) {
  switch (s) {
    case Skill::Flee: return "flee";
    case Skill::Advance: return "advance";
    case Skill::Combat: return "combat";
    case Skill::Hide: return "hide";
    case Skill::Collect: return "collect";
  }
  return "?";
}

inline Skill skill_from_name(const std::string& name) {
  for (Skill s : {Skill::Flee, Skill::Advance, Skill::Combat, Skill::Hide, Skill::Collect}) {
    if (name == skill_name(s)) return s;
  }
  throw std::runtime_error("unknown skill '" + name + "'");
}

// The BT task leaves map onto the trained skills; Search is the task name of
// the Advance skill.
inline Skill skill_for_task(bt::TaskKind task) {
  switch (task) {
    case bt::TaskKind::Combat: return Skill::Combat;
    case bt::TaskKind::Search: return Skill::Advance;
    case bt::TaskKind::Flee: return Skill::Flee;
    case bt::TaskKind::Hide: return Skill::Hide;
    case bt::TaskKind::Collect: return Skill::Collect;
  }
  return Skill::Combat;
}

inline ObservationSet observation_set_for(Skill s) {
  switch (s) {
    case Skill::Hide: return ObservationSet::CoreHide;
    case Skill::Collect: return ObservationSet::CoreCollect;
    default: return ObservationSet::Core;
  }
}

inline ObservationSet curriculum_observation_set() { return ObservationSet::CoreHideCollect; }

// Combat: depth 2, width 64, no attention; every other skill: depth 2,
// width 128, attention 60 over the last 20 observations.
inline NetworkSpec net_spec_for_skill(Skill s) {
  NetworkSpec spec;
  spec.input_width = observation_width(observation_set_for(s));
  spec.mlp_depth = 2;
  if (s == Skill::Combat) {
    spec.mlp_width = 64;
    spec.use_attention = false;
    spec.shoot_head = true;
  } else {
    spec.mlp_width = 128;
    spec.use_attention = true;
    spec.attention_dim = 60;
    spec.max_seq = 20;
    spec.shoot_head = false;
  }
  return spec;
}

inline NetworkSpec curriculum_net_spec() {
  NetworkSpec spec;
  spec.input_width = observation_width(curriculum_observation_set());
  spec.mlp_depth = 2;
  spec.mlp_width = 128;
  spec.use_attention = true;
  spec.attention_dim = 60;
  spec.max_seq = 20;
  spec.shoot_head = true;
  return spec;
}

// ---------------------------------------------------------------------------
// Rewards

struct Transition {
  AgentEvents events;  // the learner's event row
  double distance_to_player = std::numeric_limits<double>::infinity();
  bool player_in_sight = false;
  bool agent_died = false;
  bool player_died = false;
  bool reached_goal = false;      // Collect: picked up at the goal station
  bool moved_when_empty = false;  // phase 3: reloaded after running dry
};

struct SkillRewardParams {
  double flee_distance = 1000.0;  // terminal threshold, scaled in desk arenas
};

struct RewardResult {
  double reward = 0.0;
  bool done = false;
};

inline RewardResult skill_reward(Skill skill, const Transition& t,
                                 const SkillRewardParams& params = {}) {
  RewardResult r;
  switch (skill) {
    case Skill::Flee:
      r.reward = 0.001;
      if (t.distance_to_player < params.flee_distance) {
        r.reward += -1.0;
        r.done = true;
      }
      break;
    case Skill::Advance:
      r.reward = -0.001 - 0.01 * t.events.wall_collisions;
      if (t.player_in_sight) {
        r.reward += 1.0;
        r.done = true;
      }
      break;
    case Skill::Combat:
      r.reward = -0.001 + 0.1 * t.events.hits_landed;
      if (t.player_died) {
        r.reward += 1.0;
        r.done = true;
      }
      break;
    case Skill::Hide:
      r.reward = 0.001;
      if (t.player_in_sight) {
        r.reward += -1.0;
        r.done = true;
      }
      break;
    case Skill::Collect:
      r.reward = -0.001 - 0.01 * t.events.wall_collisions - 0.1 * t.events.hits_taken;
      if (t.reached_goal) {
        r.reward += 1.0;
        r.done = true;
      }
      break;
  }
  return r;
}

inline RewardResult curriculum_reward(int phase, const Transition& t) {
  RewardResult r;
  switch (phase) {
    case 1:
    case 2:
      r.reward = 1.0 * t.events.hits_landed - 0.01 * t.events.wall_collisions -
                 0.1 * t.events.hits_taken;
      r.done = t.player_died || t.agent_died;
      break;
    case 3:
      r.reward = 1.0 * t.events.hits_landed - 0.01 * t.events.wall_collisions -
                 0.1 * t.events.hits_taken - 0.01;
      if (t.moved_when_empty) r.reward += 5.0;
      r.done = t.player_died || t.agent_died;
      break;
    case 4:
    case 5:
      r.reward = 1.0 * t.events.hits_landed - 0.01 * t.events.wall_collisions - 0.001;
      if (t.agent_died) r.reward += -10.0;
      r.done = t.player_died || t.agent_died;
      break;
    default:
      throw std::runtime_error("curriculum phase must be 1..5");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Environments

enum class OpponentKind : std::uint8_t { None, Chase, ChaseShoot, SentryShoot, AggressiveBT };

struct EnvSpec {
  ArenaConfig arena;  // agent 0 is the learner, agent 1 the opponent
  OpponentKind opponent = OpponentKind::None;
  ObservationSet obs = ObservationSet::Core;
  SensorConfig sensors;
  bool curriculum = false;
  int phase = 0;           // curriculum phase when curriculum = true
  Skill skill = Skill::Combat;
  SkillRewardParams reward_params;
  int max_episode_steps = 2000;
  bool goal_station = false;  // Collect: station 0 is the reload goal
};

namespace detail {

inline std::unique_ptr<Controller> make_opponent(OpponentKind kind,
                                                 const SensorConfig& sensors) {
  switch (kind) {
    case OpponentKind::None: return std::make_unique<StaticController>();
    case OpponentKind::Chase: return std::make_unique<ChaseController>(false);
    case OpponentKind::ChaseShoot: return std::make_unique<ChaseController>(true);
    case OpponentKind::SentryShoot: return std::make_unique<SentryController>();
    case OpponentKind::AggressiveBT:
      return std::make_unique<BTController>(bt::parse_tree(bt::aggressive_tree_source()),
                                            sensors);
  }
  return std::make_unique<StaticController>();
}

}  // namespace detail

// Composes the arena with a scripted opponent and one of the reward
// functions behind the reset/step interface the trainer and harness share.
class SkillEnv {
 public:
  explicit SkillEnv(EnvSpec spec) : spec_(std::move(spec)) {
    opponent_ = detail::make_opponent(spec_.opponent, spec_.sensors);
  }
  SkillEnv(const SkillEnv& o) : spec_(o.spec_) {
    opponent_ = detail::make_opponent(spec_.opponent, spec_.sensors);
  }
  SkillEnv(SkillEnv&&) = default;

  int obs_width() const { return observation_width(spec_.obs); }
  const EnvSpec& spec() const { return spec_; }
  const WorldState& world() const { return world_; }

  Eigen::VectorXd reset(std::uint64_t seed) {
    world_ = spawn_episode(spec_.arena, seed);
    if (world_.agents.size() != 2) throw ArenaError("skill environments need two agents");
    opponent_->reset();
    episode_steps_ = 0;
    empty_armed_ = false;
    initialized_ = true;
    return encode_observation(spec_.obs, world_, kLearner, spec_.sensors);
  }

  EnvStepResult step(const ActionCommand& learner_action) {
    if (!initialized_) throw ArenaError("step before reset");
    std::map<AgentId, ActionCommand> actions;
    actions[kLearner] = learner_action;
    if (world_.agents[1].alive()) {
      actions[kOpponent] = opponent_->act(world_, kOpponent);
    }
    StepEvents ev = skirmish::step(world_, actions);

    Transition t;
    t.events = ev.agents[0];
    t.distance_to_player = ev.agents[0].distance_to_target;
    t.player_in_sight = ev.agents[0].sees_target;
    t.agent_died = ev.agents[0].died;
    t.player_died = ev.agents[1].died;
    t.reached_goal = spec_.goal_station && ev.agents[0].picked_station == 0;
    if (empty_armed_ && ev.agents[0].ammo_pickups > 0) {
      t.moved_when_empty = true;
      empty_armed_ = false;
    }
    if (world_.agents[0].ammo == 0 && !world_.agents[0].unlimited_ammo) empty_armed_ = true;

    RewardResult r = spec_.curriculum ? curriculum_reward(spec_.phase, t)
                                      : skill_reward(spec_.skill, t, spec_.reward_params);
    episode_steps_ += 1;
    EnvStepResult out;
    out.reward = r.reward;
    out.done = r.done || episode_steps_ >= spec_.max_episode_steps;
    out.obs = encode_observation(spec_.obs, world_, kLearner, spec_.sensors);
    return out;
  }

  void save_state(std::ostream& os) const {
    os << "env " << (initialized_ ? 1 : 0) << ' ' << episode_steps_ << ' '
       << (empty_armed_ ? 1 : 0) << '\n';
    if (initialized_) {
      os << serialize_world(world_, true);
      opponent_->save_state(os);
    }
  }
  void load_state(std::istream& is) {
    std::string tag;
    int init = 0, armed = 0;
    is >> tag >> init >> episode_steps_ >> armed;
    if (tag != "env") throw ArenaError("bad env state");
    initialized_ = init != 0;
    empty_armed_ = armed != 0;
    if (initialized_) {
      world_ = parse_world_text(is, spec_.arena);
      opponent_->load_state(is);
    }
  }

  static constexpr AgentId kLearner = 0;
  static constexpr AgentId kOpponent = 1;

 private:
  EnvSpec spec_;
  WorldState world_;
  std::unique_ptr<Controller> opponent_;
  int episode_steps_ = 0;
  bool empty_armed_ = false;
  bool initialized_ = false;
};

// ---------------------------------------------------------------------------
// Canonical environment factories. `arena_side` scales the arena; spawn
// separations and the flee threshold scale with it so desk-scale runs remain
// well-posed (the canonical side is 4000).

inline EnvSpec skill_env_spec(Skill skill, double arena_side = 4000.0) {
  const double scale = arena_side / 4000.0;
  EnvSpec spec;
  spec.skill = skill;
  spec.obs = observation_set_for(skill);
  spec.arena.side = arena_side;
  spec.arena.agents = {AgentSpawnSpec{0}, AgentSpawnSpec{1}};
  switch (skill) {
    case Skill::Flee:
      spec.opponent = OpponentKind::Chase;
      spec.arena.agents[1].move_speed = 300.0;
      spec.reward_params.flee_distance = 1000.0 * scale;
      spec.arena.spawn.min_separation = 1500.0 * scale;
      break;
    case Skill::Advance:
      spec.opponent = OpponentKind::None;
      spec.arena.random_obstacles = 6;
      spec.arena.random_obstacle_min = {300.0 * scale, 60.0};
      spec.arena.random_obstacle_max = {900.0 * scale, 60.0};
      spec.arena.spawn.require_no_los = true;
      spec.arena.spawn.min_separation = 600.0 * scale;
      break;
    case Skill::Combat:
      spec.opponent = OpponentKind::None;
      spec.arena.agents[0].position_locked = true;
      spec.arena.agents[0].unlimited_ammo = true;  // ten hits need more than ten rounds
      spec.arena.agents[1].position_locked = true;
      spec.arena.spawn.min_separation = 400.0 * scale;
      spec.arena.spawn.max_separation = 1600.0 * scale;
      break;
    case Skill::Hide:
      spec.opponent = OpponentKind::Chase;
      spec.arena.agents[1].move_speed = 100.0;
      spec.arena.random_obstacles = 8;
      spec.arena.random_obstacle_min = {150.0 * scale, 150.0 * scale};
      spec.arena.random_obstacle_max = {500.0 * scale, 500.0 * scale};
      spec.arena.spawn.require_no_los = true;
      spec.arena.spawn.min_separation = 800.0 * scale;
      break;
    case Skill::Collect:
      spec.opponent = OpponentKind::ChaseShoot;
      spec.arena.agents[1].move_speed = 300.0;
      spec.arena.random_stations = 1;
      spec.arena.random_obstacles = 4;
      spec.arena.random_obstacle_min = {300.0 * scale, 60.0};
      spec.arena.random_obstacle_max = {800.0 * scale, 60.0};
      spec.arena.spawn.min_separation = 800.0 * scale;
      spec.goal_station = true;
      break;
  }
  return spec;
}

// The evaluation arena: fixed obstacle layout and the eight ammo stations.
inline ArenaConfig eval_arena_config() {
  ArenaConfig cfg;
  cfg.side = 4000.0;
  cfg.obstacles = {
      {{600.0, 600.0}, {1000.0, 1400.0}},   {{3000.0, 600.0}, {3400.0, 1400.0}},
      {{600.0, 2600.0}, {1000.0, 3400.0}},  {{3000.0, 2600.0}, {3400.0, 3400.0}},
      {{1700.0, 1000.0}, {2300.0, 1160.0}}, {{1700.0, 2840.0}, {2300.0, 3000.0}},
      {{1000.0, 1920.0}, {1600.0, 2080.0}}, {{2400.0, 1920.0}, {3000.0, 2080.0}},
  };
  cfg.stations = {{200.0, 200.0},  {3800.0, 200.0},  {200.0, 3800.0}, {3800.0, 3800.0},
                  {2000.0, 200.0}, {2000.0, 3800.0}, {200.0, 2000.0}, {3800.0, 2000.0}};
  cfg.spawn.min_separation = 1000.0;
  return cfg;
}

inline EnvSpec curriculum_env_spec(int phase, double arena_side = 4000.0) {
  const double scale = arena_side / 4000.0;
  EnvSpec spec;
  spec.curriculum = true;
  spec.phase = phase;
  spec.obs = curriculum_observation_set();
  switch (phase) {
    case 1:  // combat-style, both locked, unlimited ammunition
      spec.arena.side = arena_side;
      spec.opponent = OpponentKind::SentryShoot;
      spec.arena.agents[0].position_locked = true;
      spec.arena.agents[0].unlimited_ammo = true;
      spec.arena.agents[1].position_locked = true;
      spec.arena.agents[1].unlimited_ammo = true;
      spec.arena.spawn.min_separation = 400.0 * scale;
      spec.arena.spawn.max_separation = 1600.0 * scale;
      break;
    case 2:  // advance-style: walls, stationary shooter, unlimited ammunition
      spec.arena.side = arena_side;
      spec.opponent = OpponentKind::SentryShoot;
      spec.arena.agents[0].unlimited_ammo = true;
      spec.arena.agents[1].unlimited_ammo = true;
      spec.arena.random_obstacles = 6;
      spec.arena.random_obstacle_min = {300.0 * scale, 60.0};
      spec.arena.random_obstacle_max = {900.0 * scale, 60.0};
      spec.arena.spawn.require_no_los = true;
      spec.arena.spawn.min_separation = 600.0 * scale;
      break;
    case 3:  // full arena, finite ammo, reload bonus
      if (scale != 1.0) throw std::runtime_error("phase 3 runs on the canonical arena");
      spec.arena = eval_arena_config();
      spec.opponent = OpponentKind::SentryShoot;
      spec.arena.agents[1].unlimited_ammo = true;
      break;
    case 4:  // survival against the aggressive tree, bare arena
      spec.arena.side = arena_side;
      spec.opponent = OpponentKind::AggressiveBT;
      spec.arena.agents[1].unlimited_ammo = true;
      spec.arena.spawn.min_separation = 1000.0 * scale;
      break;
    case 5:  // strategy: hiding spots and pickups active
      if (scale != 1.0) throw std::runtime_error("phase 5 runs on the canonical arena");
      spec.arena = eval_arena_config();
      spec.opponent = OpponentKind::AggressiveBT;
      spec.arena.agents[1].unlimited_ammo = true;
      break;
    default:
      throw std::runtime_error("curriculum phase must be 1..5");
  }
  return spec;
}

// Training steps from the skill table: Flee 2M, Advance 4M, Combat 2M,
// Hide 10M, Collect 12M.
inline long canonical_skill_steps(Skill s) {
  switch (s) {
    case Skill::Flee: return 2'000'000;
    case Skill::Advance: return 4'000'000;
    case Skill::Combat: return 2'000'000;
    case Skill::Hide: return 10'000'000;
    case Skill::Collect: return 12'000'000;
  }
  return 0;
}

// Per-phase budgets for the curriculum agent: 6M, 2M, 10M, 12M, 10M.
inline long canonical_phase_steps(int phase) {
  switch (phase) {
    case 1: return 6'000'000;
    case 2: return 2'000'000;
    case 3: return 10'000'000;
    case 4: return 12'000'000;
    case 5: return 10'000'000;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Training drivers

struct TrainResult {
  PolicyParams<float> params;
  std::vector<std::string> metric_lines;
};

namespace detail {

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
}

template <typename EnvT>
TrainResult run_training(Trainer<EnvT, float>& trainer, const std::string& out_dir,
                         const std::string& tag, const std::string& meta,
                         std::ostream* metrics_sink, const std::string& phase_prefix = "") {
  namespace fs = std::filesystem;
  const PpoConfig& cfg = trainer.config();
  TrainResult result;
  while (!trainer.done()) {
    auto r = trainer.run_batch();
    std::string line = phase_prefix + trainer.metrics_line(r);
    result.metric_lines.push_back(line);
    if (metrics_sink) (*metrics_sink) << line << std::flush;
    bool last = trainer.done();
    if (!out_dir.empty() &&
        (last || (cfg.checkpoint_every > 0 && r.batch_index % cfg.checkpoint_every == 0))) {
      std::string stem = (fs::path(out_dir) / (tag + "_ckpt_" + std::to_string(r.batch_index)))
                             .string();
      save_params(trainer.params(), stem + ".params");
      std::ofstream st(stem + ".state", std::ios::binary);
      trainer.save_state(st);
      write_text_file(stem + ".meta", meta + "batch = " + std::to_string(r.batch_index) +
                                          "\nglobal_steps = " + std::to_string(r.global_steps) +
                                          "\n");
    }
  }
  result.params = trainer.params();
  return result;
}

}  // namespace detail

// Trains one skill policy. When out_dir is set, writes metrics.csv, the
// observation schema, periodic checkpoints and the final weights.
inline TrainResult train_skill(Skill skill, const EnvSpec& env_spec, PpoConfig cfg,
                               std::uint64_t seed, const std::string& out_dir = "",
                               const std::string& resume_stem = "") {
  namespace fs = std::filesystem;
  if (cfg.total_steps <= 0) cfg.total_steps = canonical_skill_steps(skill);
  cfg.max_episode_steps = std::min(cfg.max_episode_steps, env_spec.max_episode_steps);
  NetworkSpec spec = net_spec_for_skill(skill);
  std::vector<SkillEnv> envs(static_cast<std::size_t>(cfg.num_envs), SkillEnv(env_spec));
  Trainer<SkillEnv, float> trainer(std::move(envs), spec, cfg, seed);
  if (!resume_stem.empty()) {
    trainer.set_params(load_params<float>(resume_stem + ".params", spec));
    std::ifstream st(resume_stem + ".state", std::ios::binary);
    if (!st) throw PpoError("cannot open checkpoint state '" + resume_stem + ".state'");
    trainer.load_state(st);
  }
  std::ofstream metrics;
  std::string meta = std::string("kind = skill\nskill = ") + skill_name(skill) +
                     "\nseed = " + std::to_string(seed) + "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    bool fresh = resume_stem.empty();
    metrics.open((fs::path(out_dir) / "metrics.csv").string(),
                 fresh ? std::ios::binary : (std::ios::binary | std::ios::app));
    if (fresh) metrics << Trainer<SkillEnv, float>::metrics_header();
    detail::write_text_file((fs::path(out_dir) / "observation_schema.txt").string(),
                            schema_to_text(observation_schema(env_spec.obs)));
  }
  TrainResult result = detail::run_training(trainer, out_dir, skill_name(skill), meta,
                                            out_dir.empty() ? nullptr : &metrics);
  if (!out_dir.empty()) {
    save_params(result.params,
                (fs::path(out_dir) / (std::string(skill_name(skill)) + ".params")).string());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Policy evaluation in a skill environment. Episodes run under derived
// seeds; "terminal" counts episodes whose own condition fired before the
// step cap (a kill for Combat, sighting for Advance, getting caught for
// Flee/Hide, the reload for Collect).

struct SkillEvalStats {
  int episodes = 0;
  int terminals = 0;
  double terminal_rate = 0.0;
  double mean_steps = 0.0;
  double mean_return = 0.0;
};

enum class EvalActionMode : std::uint8_t { Deterministic, Sampled, UniformRandom };

inline SkillEvalStats evaluate_skill_policy(const EnvSpec& env_spec, const NetworkSpec& net,
                                            const PolicyParams<float>& params, int episodes,
                                            std::uint64_t seed,
                                            EvalActionMode mode = EvalActionMode::Deterministic) {
  SkillEvalStats stats;
  stats.episodes = episodes;
  SkillEnv env(env_spec);
  double steps_sum = 0.0, return_sum = 0.0;
  for (int i = 0; i < episodes; ++i) {
    Rng action_rng(mix_seed(seed, 0x99000000ull + static_cast<std::uint64_t>(i)));
    PolicyRuntime<float> runtime(&params);
    Eigen::VectorXd obs = env.reset(mix_seed(seed, static_cast<std::uint64_t>(i)));
    long steps = 0;
    double ret = 0.0;
    bool done = false;
    while (!done) {
      ActionCommand cmd;
      if (mode == EvalActionMode::UniformRandom) {
        cmd.lateral = action_rng.uniform(-1.0, 1.0);
        cmd.forward = action_rng.uniform(-1.0, 1.0);
        cmd.shoot = action_rng.bernoulli(0.5);
      } else {
        PolicyOutput<float> out = runtime.observe(obs.cast<float>());
        cmd = mode == EvalActionMode::Deterministic ? deterministic_action(out)
                                                    : sample_action(out, action_rng).command;
      }
      EnvStepResult r = env.step(cmd);
      obs = r.obs;
      ret += r.reward;
      steps += 1;
      done = r.done;
    }
    steps_sum += static_cast<double>(steps);
    return_sum += ret;
    if (steps < env_spec.max_episode_steps) stats.terminals += 1;
  }
  stats.terminal_rate = static_cast<double>(stats.terminals) / episodes;
  stats.mean_steps = steps_sum / episodes;
  stats.mean_return = return_sum / episodes;
  return stats;
}

// Trains the curriculum agent through phases 1..5, carrying parameters
// across phase boundaries. phase_steps overrides the canonical budgets
// (entries <= 0 fall back); phases beyond the vector run at canonical scale.
inline TrainResult run_curriculum(PpoConfig base_cfg, std::uint64_t seed,
                                  const std::string& out_dir = "",
                                  std::vector<long> phase_steps = {},
                                  double arena_side = 4000.0, int last_phase = 5) {
  namespace fs = std::filesystem;
  NetworkSpec spec = curriculum_net_spec();
  std::ofstream metrics;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    metrics.open((fs::path(out_dir) / "metrics.csv").string(), std::ios::binary);
    metrics << "phase," << Trainer<SkillEnv, float>::metrics_header();
    detail::write_text_file((fs::path(out_dir) / "observation_schema.txt").string(),
                            schema_to_text(observation_schema(curriculum_observation_set())));
  }
  TrainResult result;
  PolicyParams<float> carried = init_params<float>(spec, mix_seed(seed, 0x5eed0001ull));
  for (int phase = 1; phase <= last_phase; ++phase) {
    PpoConfig cfg = base_cfg;
    cfg.total_steps = canonical_phase_steps(phase);
    if (static_cast<std::size_t>(phase) <= phase_steps.size() && phase_steps[phase - 1] > 0) {
      cfg.total_steps = phase_steps[phase - 1];
    }
    EnvSpec env_spec = curriculum_env_spec(phase, arena_side);
    std::vector<SkillEnv> envs(static_cast<std::size_t>(cfg.num_envs), SkillEnv(env_spec));
    Trainer<SkillEnv, float> trainer(std::move(envs), spec, cfg, mix_seed(seed, phase));
    trainer.set_params(carried);
    std::string meta = "kind = curriculum\nphase = " + std::to_string(phase) +
                       "\nseed = " + std::to_string(seed) + "\n";
    TrainResult phase_result = detail::run_training(
        trainer, out_dir, "curriculum_p" + std::to_string(phase), meta,
        out_dir.empty() ? nullptr : &metrics, std::to_string(phase) + ",");
    carried = phase_result.params;
    for (auto& line : phase_result.metric_lines) result.metric_lines.push_back(line);
  }
  result.params = carried;
  if (!out_dir.empty()) {
    save_params(result.params, (fs::path(out_dir) / "curriculum.params").string());
  }
  return result;
}

}  // namespace skirmish
