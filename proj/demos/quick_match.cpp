// Minimal library walkthrough: spawn the evaluation arena, pit the scripted
// behavior-tree agent against the aggressive variant, and print the outcome
// plus the first few decisions of the tree.

#include <iostream>

#include "skirmish/skirmish.hpp"

using namespace skirmish;

int main() {
  ArenaConfig arena = eval_arena_config();
  arena.agents.assign(2, AgentSpawnSpec{});
  arena.agents[1].unlimited_ammo = true;  // the aggressive variant's edge
  WorldState world = spawn_episode(arena, 7);

  BTController bt_agent(bt::parse_tree(bt::default_tree_source()));
  BTController aggressive(bt::parse_tree(bt::aggressive_tree_source()));

  long steps = 0;
  while (steps < kMatchRestartSteps) {
    std::map<AgentId, ActionCommand> actions;
    if (world.agents[0].alive()) actions[0] = bt_agent.act(world, 0);
    if (world.agents[1].alive()) actions[1] = aggressive.act(world, 1);
    step(world, actions);
    ++steps;
    if (steps <= 5) {
      std::cout << "step " << steps << ": bt agent runs '"
                << bt::task_name(*bt_agent.last_trace()->active_task) << "' at distance "
                << static_cast<long>(
                       distance(world.agents[0].position, world.agents[1].position))
                << "\n";
    }
    if (!world.agents[0].alive() || !world.agents[1].alive()) break;
  }
  std::cout << "finished after " << steps << " steps; health " << world.agents[0].health
            << " vs " << world.agents[1].health << "\n";
  return 0;
}
