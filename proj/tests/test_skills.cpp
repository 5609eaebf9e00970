#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "skirmish/skills.hpp"

using namespace skirmish;

namespace {

Transition quiet_transition() {
  Transition t;
  t.distance_to_player = 2000.0;
  return t;
}

}  // namespace

TEST_CASE("flee rewards match the table exactly", "[skills]") {
  Transition t = quiet_transition();
  t.distance_to_player = 1200.0;
  RewardResult r = skill_reward(Skill::Flee, t);
  CHECK(r.reward == 0.001);
  CHECK_FALSE(r.done);

  t.distance_to_player = 950.0;
  r = skill_reward(Skill::Flee, t);
  CHECK(r.reward == 0.001 - 1.0);
  CHECK(r.done);

  // The threshold is strict: exactly 1000 is not inside.
  t.distance_to_player = 1000.0;
  CHECK_FALSE(skill_reward(Skill::Flee, t).done);
  t.distance_to_player = 999.999;
  CHECK(skill_reward(Skill::Flee, t).done);
}

TEST_CASE("advance rewards match the table exactly", "[skills]") {
  Transition t = quiet_transition();
  CHECK(skill_reward(Skill::Advance, t).reward == -0.001);
  t.events.wall_collisions = 1;
  CHECK(skill_reward(Skill::Advance, t).reward == -0.001 - 0.01);
  t.events.wall_collisions = 0;
  t.player_in_sight = true;
  RewardResult r = skill_reward(Skill::Advance, t);
  CHECK(r.reward == -0.001 + 1.0);
  CHECK(r.done);
}

TEST_CASE("combat rewards match the table exactly", "[skills]") {
  Transition t = quiet_transition();
  CHECK(skill_reward(Skill::Combat, t).reward == -0.001);
  t.events.hits_landed = 1;
  CHECK(skill_reward(Skill::Combat, t).reward == -0.001 + 0.1);
  CHECK_FALSE(skill_reward(Skill::Combat, t).done);
  // The killing hit earns both the hit bonus and the terminal bonus.
  t.player_died = true;
  RewardResult r = skill_reward(Skill::Combat, t);
  CHECK(r.reward == -0.001 + 0.1 + 1.0);
  CHECK(r.done);
}

TEST_CASE("hide rewards match the table exactly", "[skills]") {
  Transition t = quiet_transition();
  CHECK(skill_reward(Skill::Hide, t).reward == 0.001);
  t.player_in_sight = true;
  RewardResult r = skill_reward(Skill::Hide, t);
  CHECK(r.reward == 0.001 - 1.0);
  CHECK(r.done);
}

TEST_CASE("collect rewards match the table exactly", "[skills]") {
  Transition t = quiet_transition();
  CHECK(skill_reward(Skill::Collect, t).reward == -0.001);
  t.events.wall_collisions = 1;
  t.events.hits_taken = 1;
  RewardResult r = skill_reward(Skill::Collect, t);
  CHECK(r.reward == -0.001 - 0.01 - 0.1);
  CHECK_FALSE(r.done);
  t.reached_goal = true;
  r = skill_reward(Skill::Collect, t);
  CHECK(r.reward == -0.001 - 0.01 - 0.1 + 1.0);
  CHECK(r.done);
}

TEST_CASE("terminal predicates fire exactly on their conditions", "[skills]") {
  Transition t = quiet_transition();
  CHECK_FALSE(skill_reward(Skill::Flee, t).done);
  CHECK_FALSE(skill_reward(Skill::Advance, t).done);
  CHECK_FALSE(skill_reward(Skill::Combat, t).done);
  CHECK_FALSE(skill_reward(Skill::Hide, t).done);
  CHECK_FALSE(skill_reward(Skill::Collect, t).done);
  t.agent_died = true;  // no skill terminal triggers on learner death
  CHECK_FALSE(skill_reward(Skill::Combat, t).done);
}

TEST_CASE("curriculum rewards match the table exactly", "[skills]") {
  Transition t = quiet_transition();
  t.events.hits_landed = 1;
  CHECK(curriculum_reward(1, t).reward == 1.0);
  CHECK(curriculum_reward(2, t).reward == 1.0);

  t = quiet_transition();
  t.events.wall_collisions = 1;
  CHECK(curriculum_reward(1, t).reward == -0.01);
  t = quiet_transition();
  t.events.hits_taken = 1;
  CHECK(curriculum_reward(2, t).reward == -0.1);

  // Phase 3 adds the step penalty and the reload-when-empty bonus.
  t = quiet_transition();
  CHECK(curriculum_reward(3, t).reward == -0.01);
  t.moved_when_empty = true;
  CHECK(curriculum_reward(3, t).reward == -0.01 + 5.0);
  t.events.hits_taken = 1;
  CHECK(curriculum_reward(3, t).reward == -0.1 - 0.01 + 5.0);

  // Phases 4 and 5: survival shaping with the death penalty.
  t = quiet_transition();
  CHECK(curriculum_reward(4, t).reward == -0.001);
  CHECK_FALSE(curriculum_reward(4, t).done);
  t.agent_died = true;
  RewardResult r = curriculum_reward(4, t);
  CHECK(r.reward == -0.001 - 10.0);
  CHECK(r.done);
  t = quiet_transition();
  t.events.hits_landed = 2;
  t.player_died = true;
  r = curriculum_reward(5, t);
  CHECK(r.reward == 2.0 - 0.001);
  CHECK(r.done);

  CHECK_THROWS(curriculum_reward(6, quiet_transition()));
}

TEST_CASE("network specs follow the configuration table", "[skills]") {
  NetworkSpec combat = net_spec_for_skill(Skill::Combat);
  CHECK(combat.input_width == 148);
  CHECK(combat.mlp_depth == 2);
  CHECK(combat.mlp_width == 64);
  CHECK_FALSE(combat.use_attention);
  CHECK(combat.shoot_head);

  for (Skill s : {Skill::Flee, Skill::Advance, Skill::Hide, Skill::Collect}) {
    NetworkSpec spec = net_spec_for_skill(s);
    CHECK(spec.mlp_depth == 2);
    CHECK(spec.mlp_width == 128);
    CHECK(spec.use_attention);
    CHECK(spec.attention_dim == 60);
    CHECK(spec.max_seq == 20);
    CHECK_FALSE(spec.shoot_head);
  }
  CHECK(net_spec_for_skill(Skill::Flee).input_width == 148);
  CHECK(net_spec_for_skill(Skill::Advance).input_width == 148);
  CHECK(net_spec_for_skill(Skill::Hide).input_width == 150);
  CHECK(net_spec_for_skill(Skill::Collect).input_width == 151);

  NetworkSpec cur = curriculum_net_spec();
  CHECK(cur.input_width == 153);  // superset: core + hide + collect
  CHECK(cur.mlp_width == 128);
  CHECK(cur.use_attention);
  CHECK(cur.shoot_head);
}

TEST_CASE("task leaves map onto their skills", "[skills]") {
  CHECK(skill_for_task(bt::TaskKind::Combat) == Skill::Combat);
  CHECK(skill_for_task(bt::TaskKind::Search) == Skill::Advance);
  CHECK(skill_for_task(bt::TaskKind::Flee) == Skill::Flee);
  CHECK(skill_for_task(bt::TaskKind::Hide) == Skill::Hide);
  CHECK(skill_for_task(bt::TaskKind::Collect) == Skill::Collect);
  CHECK(skill_from_name("combat") == Skill::Combat);
  CHECK_THROWS(skill_from_name("juggle"));
}

TEST_CASE("flee pursuer closes at 300 units per second", "[skills]") {
  SkillEnv env(skill_env_spec(Skill::Flee));
  env.reset(12);
  double d0 = distance(env.world().agents[0].position, env.world().agents[1].position);
  int n = 30;
  for (int i = 0; i < n; ++i) env.step({});
  double d1 = distance(env.world().agents[0].position, env.world().agents[1].position);
  // One second of pursuit at 300 u/s against a stationary learner.
  CHECK(d0 - d1 == Catch::Approx(300.0).margin(1.0));
}

TEST_CASE("hide pursuer closes at 100 units per second", "[skills]") {
  SkillEnv env(skill_env_spec(Skill::Hide));
  env.reset(5);
  double d0 = distance(env.world().agents[0].position, env.world().agents[1].position);
  for (int i = 0; i < 30; ++i) {
    auto out = env.step({});
    if (out.done) return;  // spotted early; the speed check needs a quiet run
  }
  double d1 = distance(env.world().agents[0].position, env.world().agents[1].position);
  CHECK(d0 - d1 == Catch::Approx(100.0).margin(1.0));
}

TEST_CASE("combat environment locks every position", "[skills]") {
  SkillEnv env(skill_env_spec(Skill::Combat));
  env.reset(9);
  Vec2 a = env.world().agents[0].position;
  Vec2 b = env.world().agents[1].position;
  for (int i = 0; i < 50; ++i) env.step({1.0, 1.0, false});
  CHECK(env.world().agents[0].position == a);
  CHECK(env.world().agents[1].position == b);
  // Unlimited ammunition for the learner.
  CHECK(env.world().agents[0].unlimited_ammo);
}

TEST_CASE("advance environment keeps the target stationary and unseen at spawn", "[skills]") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    SkillEnv env(skill_env_spec(Skill::Advance));
    env.reset(seed);
    CHECK_FALSE(line_of_sight(env.world(), env.world().agents[0].position,
                              env.world().agents[1].position));
    Vec2 b = env.world().agents[1].position;
    for (int i = 0; i < 30; ++i) env.step({});
    CHECK(env.world().agents[1].position == b);
  }
}

TEST_CASE("flee terminal fires exactly at the threshold crossing", "[skills]") {
  SkillEnv env(skill_env_spec(Skill::Flee));
  env.reset(7);
  // The learner holds still; the pursuer closes 10 u per step from >= 1500.
  bool done = false;
  int steps = 0;
  double final_distance = 0.0;
  while (!done && steps < 2000) {
    auto out = env.step({});
    done = out.done;
    steps += 1;
    final_distance = distance(env.world().agents[0].position, env.world().agents[1].position);
    if (!done) {
      REQUIRE(final_distance >= 1000.0 - 1e-9);
    }
  }
  REQUIRE(done);
  CHECK(final_distance < 1000.0);
}

TEST_CASE("collect reload ends the episode with the bonus", "[skills]") {
  EnvSpec spec;
  spec.skill = Skill::Collect;
  spec.obs = observation_set_for(Skill::Collect);
  spec.goal_station = true;
  spec.arena.side = 1000.0;
  spec.arena.stations = {{500.0, 500.0}};
  spec.arena.spawn.min_separation = 0.0;
  spec.opponent = OpponentKind::None;
  SkillEnv env(spec);
  env.reset(3);
  bool done = false;
  double last_reward = 0.0;
  for (int i = 0; i < 400 && !done; ++i) {
    Vec2 to_station = Vec2{500.0, 500.0} - env.world().agents[0].position;
    ActionCommand cmd = world_dir_to_action(env.world(), env.world().agents[0], to_station);
    auto out = env.step(cmd);
    done = out.done;
    last_reward = out.reward;
  }
  REQUIRE(done);
  CHECK(last_reward == Catch::Approx(1.0 - 0.001));
}

TEST_CASE("phase 3 grants the reload bonus once per depletion", "[skills]") {
  EnvSpec spec;
  spec.curriculum = true;
  spec.phase = 3;
  spec.obs = curriculum_observation_set();
  spec.arena.side = 1000.0;
  spec.arena.start_ammo = 0;  // starts depleted
  spec.arena.stations = {{300.0, 500.0}, {700.0, 500.0}};
  spec.arena.station_respawn_steps = 10000;
  spec.arena.spawn.min_separation = 0.0;
  spec.opponent = OpponentKind::None;
  SkillEnv env(spec);
  env.reset(11);

  auto walk_to = [&](Vec2 goal) {
    double bonus_reward = 0.0;
    for (int i = 0; i < 400; ++i) {
      Vec2 d = goal - env.world().agents[0].position;
      if (d.norm() < 5.0) break;
      auto out = env.step(world_dir_to_action(env.world(), env.world().agents[0], d));
      if (out.reward > 1.0) bonus_reward = out.reward;
      if (out.done) break;
    }
    return bonus_reward;
  };
  // First station: bonus (arrived with zero ammunition).
  double first = walk_to({300.0, 500.0});
  CHECK(first == Catch::Approx(5.0 - 0.01));
  // Second station without re-depleting: no bonus.
  double second = walk_to({700.0, 500.0});
  CHECK(second == 0.0);
  CHECK(env.world().agents[0].ammo == 20);
}

TEST_CASE("episode cap truncates without a terminal bonus", "[skills]") {
  EnvSpec spec = skill_env_spec(Skill::Flee);
  spec.max_episode_steps = 5;
  SkillEnv env(spec);
  env.reset(21);
  EnvStepResult out;
  for (int i = 0; i < 5; ++i) out = env.step({0.0, 1.0, false});
  CHECK(out.done);
  CHECK(out.reward == 0.001);  // plain step reward, no -1 terminal
}

TEST_CASE("environments are deterministic and serializable", "[skills]") {
  SkillEnv a(skill_env_spec(Skill::Collect));
  SkillEnv b(skill_env_spec(Skill::Collect));
  Eigen::VectorXd oa = a.reset(99), ob = b.reset(99);
  REQUIRE(oa == ob);
  for (int i = 0; i < 20; ++i) {
    auto ra = a.step({0.5, 0.5, false});
    auto rb = b.step({0.5, 0.5, false});
    REQUIRE(ra.reward == rb.reward);
    REQUIRE(ra.obs == rb.obs);
  }
  std::ostringstream st;
  a.save_state(st);
  SkillEnv c(skill_env_spec(Skill::Collect));
  std::istringstream in(st.str());
  c.load_state(in);
  for (int i = 0; i < 20; ++i) {
    auto ra = a.step({-0.3, 1.0, false});
    auto rc = c.step({-0.3, 1.0, false});
    REQUIRE(ra.reward == rc.reward);
    REQUIRE(ra.obs == rc.obs);
  }
}

TEST_CASE("curriculum phase environments compose as specified", "[skills]") {
  SkillEnv p1(curriculum_env_spec(1));
  p1.reset(2);
  CHECK(p1.world().agents[0].position_locked);
  CHECK(p1.world().agents[0].unlimited_ammo);
  CHECK(p1.world().agents[1].position_locked);

  SkillEnv p4(curriculum_env_spec(4));
  p4.reset(2);
  CHECK(p4.world().obstacles.empty());
  CHECK(p4.world().agents[1].unlimited_ammo);

  SkillEnv p5(curriculum_env_spec(5));
  p5.reset(2);
  CHECK(p5.world().obstacles.size() == 8);
  CHECK(p5.world().stations.size() == 8);
  CHECK(p5.obs_width() == 153);

  CHECK_THROWS(curriculum_env_spec(3, 1000.0));
}

TEST_CASE("micro training runs are reproducible end to end", "[skills]") {
  PpoConfig cfg;
  cfg.train_batch = 64;
  cfg.minibatch = 32;
  cfg.epochs = 2;
  cfg.num_envs = 2;
  cfg.total_steps = 128;
  EnvSpec spec = skill_env_spec(Skill::Combat, 1000.0);
  TrainResult a = train_skill(Skill::Combat, spec, cfg, 77);
  TrainResult b = train_skill(Skill::Combat, spec, cfg, 77);
  REQUIRE(a.metric_lines == b.metric_lines);
  REQUIRE(a.params.flat == b.params.flat);
  REQUIRE(a.metric_lines.size() == 2);
}
