// Command-line entry point: training, evaluation, benchmarking, histogram
// export and replay tracing. Configuration precedence is defaults < config
// files < --override key=value pairs, and every run writes the resolved
// configuration beside its outputs so experiments are self-describing.

#include <CLI11.hpp>
#include <sys/utsname.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "skirmish/skirmish.hpp"

namespace fs = std::filesystem;
using namespace skirmish;

namespace {

struct CommonArgs {
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_files, "configuration file (TOML, repeatable)");
  cmd->add_option("--override", args.overrides, "override key=value (repeatable)");
  cmd->add_option("--seed", args.seed, "random seed")->default_val(0);
  cmd->add_option("--out", args.out, "output directory (default $SKIRMISH_OUT_ROOT/<run>)");
}

ConfigMap load_config(const CommonArgs& args) {
  ConfigMap m;
  for (const auto& f : args.config_files) m.merge_file(f);
  for (const auto& o : args.overrides) m.merge_override(o);
  return m;
}

std::string resolve_out_dir(const CommonArgs& args, const std::string& run_name) {
  if (!args.out.empty()) return args.out;
  const char* root = std::getenv("SKIRMISH_OUT_ROOT");
  return (fs::path(root ? root : "runs") / run_name).string();
}

void write_resolved(const ConfigMap& m, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream f(fs::path(out_dir) / "resolved.toml", std::ios::binary);
  f << m.to_toml();
}

std::string machine_string() {
  utsname u{};
  if (uname(&u) != 0) return "unknown";
  return std::string(u.sysname) + " " + u.machine;
}

ArenaConfig arena_for_matches(const ConfigMap& m) {
  return arena_from_config(m, eval_arena_config());
}

int cmd_train_skill(const CommonArgs& args, const std::string& skill_name_arg, long steps,
                    double arena_side, const std::string& resume) {
  Skill skill = skill_from_name(skill_name_arg);
  ConfigMap m = load_config(args);
  EnvSpec env_defaults = skill_env_spec(skill, arena_side);
  EnvSpec env = env_spec_from_config(m, env_defaults);
  PpoConfig ppo = ppo_from_config(m);
  if (steps > 0) ppo.total_steps = steps;
  if (ppo.total_steps <= 0) ppo.total_steps = canonical_skill_steps(skill);

  std::string out_dir = resolve_out_dir(args, "train_" + skill_name_arg);
  ConfigMap resolved;
  env_spec_to_config(env, resolved);
  ppo_to_config(ppo, resolved);
  resolved.set("run.command", {std::string("train-skill")});
  resolved.set("run.skill", {skill_name_arg});
  resolved.set("run.seed", {static_cast<std::int64_t>(args.seed)});
  write_resolved(resolved, out_dir);

  TrainResult r = train_skill(skill, env, ppo, args.seed, out_dir, resume);
  std::cout << "trained " << skill_name_arg << " for " << ppo.total_steps << " steps; weights: "
            << (fs::path(out_dir) / (skill_name_arg + ".params")).string() << "\n";
  if (!r.metric_lines.empty()) std::cout << "final: " << r.metric_lines.back();
  return 0;
}

int cmd_train_curriculum(const CommonArgs& args, double arena_side, int last_phase,
                         const std::vector<long>& phase_steps) {
  ConfigMap m = load_config(args);
  PpoConfig ppo = ppo_from_config(m);
  std::string out_dir = resolve_out_dir(args, "train_curriculum");
  ConfigMap resolved;
  ppo_to_config(ppo, resolved);
  resolved.set("run.command", {std::string("train-curriculum")});
  resolved.set("run.seed", {static_cast<std::int64_t>(args.seed)});
  resolved.set("run.last_phase", {static_cast<std::int64_t>(last_phase)});
  write_resolved(resolved, out_dir);

  TrainResult r = run_curriculum(ppo, args.seed, out_dir, phase_steps, arena_side, last_phase);
  std::cout << "curriculum weights: " << (fs::path(out_dir) / "curriculum.params").string()
            << "\n";
  if (!r.metric_lines.empty()) std::cout << "final: " << r.metric_lines.back();
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& a, const std::string& b, int episodes,
             const std::string& setting) {
  ConfigMap m = load_config(args);
  ArenaConfig arena = arena_for_matches(m);
  EvalReport report = evaluate(parse_agent_spec(a), parse_agent_spec(b), arena, episodes,
                               args.seed, setting);
  std::string out_dir = resolve_out_dir(args, "eval_" + report.setting);
  ConfigMap resolved;
  arena_to_config(arena, resolved);
  resolved.set("run.command", {std::string("eval")});
  resolved.set("run.a", {a});
  resolved.set("run.b", {b});
  resolved.set("run.episodes", {static_cast<std::int64_t>(episodes)});
  resolved.set("run.seed", {static_cast<std::int64_t>(args.seed)});
  write_resolved(resolved, out_dir);
  std::ofstream(fs::path(out_dir) / "report.csv", std::ios::binary)
      << eval_summary_csv({report});
  std::ofstream(fs::path(out_dir) / "samples.csv", std::ios::binary) << samples_csv({report});

  std::cout << "setting " << report.setting << ": win rate " << report.win_rate
            << ", mean steps " << report.mean_steps << ", mean damage " << report.mean_damage
            << ", restart fraction " << report.restart_fraction << "\n"
            << "report: " << (fs::path(out_dir) / "report.csv").string() << "\n";
  return 0;
}

int cmd_bench(const CommonArgs& args, std::vector<std::string> kinds, std::vector<int> agents,
              long steps, int repeats) {
  ConfigMap m = load_config(args);
  ArenaConfig arena = arena_for_matches(m);
  if (kinds.empty()) kinds = {"no-model", "bt", "hybrid", "curriculum"};
  if (agents.empty()) agents = {1, 10};
  std::vector<BenchResult> results;
  for (const auto& kind : kinds) {
    for (int n : agents) {
      BenchResult r = bench_throughput(parse_agent_spec(kind), n, steps, repeats, arena,
                                       args.seed);
      std::cout << kind << " x" << n << ": " << r.mean_sps << " +- " << r.std_sps
                << " steps/s\n";
      results.push_back(std::move(r));
    }
  }
  std::string out_dir = resolve_out_dir(args, "bench");
  ConfigMap resolved;
  arena_to_config(arena, resolved);
  resolved.set("run.command", {std::string("bench")});
  resolved.set("run.steps", {static_cast<std::int64_t>(steps)});
  resolved.set("run.repeats", {static_cast<std::int64_t>(repeats)});
  resolved.set("run.seed", {static_cast<std::int64_t>(args.seed)});
  write_resolved(resolved, out_dir);
  std::ofstream(fs::path(out_dir) / "bench.csv", std::ios::binary)
      << bench_csv(results, machine_string());
  std::cout << "bench: " << (fs::path(out_dir) / "bench.csv").string() << "\n";
  return 0;
}

int cmd_export(const CommonArgs& args, const std::string& samples_path, int bins) {
  std::ifstream in(samples_path, std::ios::binary);
  if (!in) throw HarnessError("cannot open samples file '" + samples_path + "'");
  auto samples = parse_samples_csv(in);
  std::string out_dir = resolve_out_dir(args, "export");
  auto written = export_histograms(samples, out_dir, bins);
  for (const auto& w : written) std::cout << "wrote " << w << "\n";
  return 0;
}

int cmd_trace(const CommonArgs& args, const std::string& a, const std::string& b,
              const std::string& out_file, long max_steps) {
  ConfigMap m = load_config(args);
  ArenaConfig arena = arena_for_matches(m);
  MatchTrace t = trace_match(parse_agent_spec(a), parse_agent_spec(b), arena, args.seed,
                             max_steps);
  fs::path out = out_file.empty() ? fs::path(resolve_out_dir(args, "trace")) / "match.trace"
                                  : fs::path(out_file);
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  std::ofstream(out, std::ios::binary) << t.to_text();
  std::ofstream(out.string() + ".ticks", std::ios::binary) << t.tick_log;
  std::cout << "trace: " << out.string() << " (steps " << t.result.steps << ", winner "
            << t.result.winner << ", hash " << MatchTrace::to_hex(t.hash) << ")\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& file) {
  ConfigMap m = load_config(args);
  ArenaConfig arena = arena_for_matches(m);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw HarnessError("cannot open trace '" + file + "'");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string why;
  if (verify_match_trace(content, arena, &why)) {
    std::cout << "trace verified: " << file << "\n";
    return 0;
  }
  std::cerr << "trace verification FAILED: " << why << "\n";
  return 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skirmish: headless arena-combat simulator with behavior-tree and RL agents"};
  app.require_subcommand(1);

  CommonArgs train_args;
  std::string train_skill_name;
  long train_steps = 0;
  double train_arena_side = 4000.0;
  std::string train_resume;
  auto* train = app.add_subcommand("train-skill", "train one skill policy with PPO");
  train->add_option("skill", train_skill_name, "flee|advance|combat|hide|collect")->required();
  add_common(train, train_args);
  train->add_option("--steps", train_steps, "total environment steps (0: canonical)");
  train->add_option("--arena-side", train_arena_side, "arena side in units")->default_val(4000.0);
  train->add_option("--resume", train_resume, "checkpoint stem to resume from");

  CommonArgs cur_args;
  double cur_arena_side = 4000.0;
  int cur_last_phase = 5;
  std::vector<long> cur_phase_steps;
  auto* cur = app.add_subcommand("train-curriculum", "train the curriculum agent, phases 1-5");
  add_common(cur, cur_args);
  cur->add_option("--arena-side", cur_arena_side)->default_val(4000.0);
  cur->add_option("--last-phase", cur_last_phase, "stop after this phase")->default_val(5);
  cur->add_option("--phase-steps", cur_phase_steps,
                  "per-phase step budgets (repeatable; 0 keeps canonical)");

  CommonArgs eval_args;
  std::string eval_a = "bt", eval_b = "static", eval_setting;
  int eval_episodes = 100;
  auto* eval_cmd = app.add_subcommand("eval", "head-to-head evaluation over seeded episodes");
  eval_cmd->add_option("--a", eval_a, "agent A spec (e.g. bt, hybrid:combat=w.params)")
      ->required();
  eval_cmd->add_option("--b", eval_b, "agent B spec")->required();
  eval_cmd->add_option("--episodes", eval_episodes)->default_val(100);
  eval_cmd->add_option("--setting", eval_setting, "label for reports");
  add_common(eval_cmd, eval_args);

  CommonArgs bench_args;
  std::vector<std::string> bench_kinds;
  std::vector<int> bench_agents;
  long bench_steps = 100000;
  int bench_repeats = 5;
  auto* bench = app.add_subcommand("bench", "steps/second throughput benchmark");
  bench->add_option("--kind", bench_kinds, "agent kinds (default: the full matrix)");
  bench->add_option("--agents", bench_agents, "agent counts (default: 1 and 10)");
  bench->add_option("--steps", bench_steps)->default_val(100000);
  bench->add_option("--repeats", bench_repeats)->default_val(5);
  add_common(bench, bench_args);

  CommonArgs export_args;
  std::string export_samples;
  int export_bins = 20;
  auto* exp = app.add_subcommand("export", "episode-length histograms from a samples CSV");
  exp->add_option("--samples", export_samples, "samples.csv from eval")->required();
  exp->add_option("--bins", export_bins)->default_val(20);
  add_common(exp, export_args);

  CommonArgs trace_args;
  std::string trace_a = "bt", trace_b = "static", trace_out, trace_verify_file;
  long trace_max_steps = kMatchRestartSteps;
  auto* trace = app.add_subcommand("trace", "record or verify a deterministic match replay");
  trace->add_option("--a", trace_a);
  trace->add_option("--b", trace_b);
  trace->add_option("--out-file", trace_out, "trace file to write");
  trace->add_option("--max-steps", trace_max_steps)->default_val(kMatchRestartSteps);
  trace->add_option("--verify", trace_verify_file, "verify this trace instead of recording");
  add_common(trace, trace_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return cmd_train_skill(train_args, train_skill_name, train_steps, train_arena_side,
                             train_resume);
    }
    if (cur->parsed()) {
      return cmd_train_curriculum(cur_args, cur_arena_side, cur_last_phase, cur_phase_steps);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(eval_args, eval_a, eval_b, eval_episodes, eval_setting);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_args, bench_kinds, bench_agents, bench_steps, bench_repeats);
    }
    if (exp->parsed()) return cmd_export(export_args, export_samples, export_bins);
    if (trace->parsed()) {
      if (!trace_verify_file.empty()) return cmd_verify(trace_args, trace_verify_file);
      return cmd_trace(trace_args, trace_a, trace_b, trace_out, trace_max_steps);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const PolicyError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
