#pragma once

// Head-to-head evaluation, replay tracing, throughput benchmarking and
// episode-length exports.
//
// Agent kinds:
//   bt          behavior tree with scripted task leaves
//   hybrid      the same tree with policy task leaves (scripted fallback)
//   curriculum  one policy queried every step
//   static      does not move nor attack
//   aggressive  the tree minus its flee/hide branches, unlimited ammunition
//   no-model    idle agent for benchmark baselines
//
// Matches step a shared world, ticking each agent's controller, until one
// side dies or the 10,000-step restart threshold; restarted episodes are
// re-run under fresh seeds and reported as a separate fraction.

#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skirmish/controllers.hpp"
#include "skirmish/skills.hpp"

namespace skirmish {

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AgentKind : std::uint8_t { BT, Hybrid, Curriculum, Static, Aggressive, NoModel };

inline const char* agent_kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::BT: return "bt";
    case AgentKind::Hybrid: return "hybrid";
    case AgentKind::Curriculum: return "curriculum";
    case AgentKind::Static: return "static";
    case AgentKind::Aggressive: return "aggressive";
    case AgentKind::NoModel: return "no-model";
  }
  return "?";
}

struct AgentSpec {
  AgentKind kind = AgentKind::Static;
  std::string tree_file;                              // empty: built-in tree
  std::map<bt::TaskKind, std::string> policy_files;   // hybrid leaves
  std::string model_file;                             // curriculum weights
  std::uint64_t init_seed = 1;  // seeds random-init weights when files are absent
  SensorConfig sensors;
  std::string descriptor;  // the string this spec was parsed from, for traces

  bool unlimited_ammo() const { return kind == AgentKind::Aggressive; }
};

// CLI / trace syntax, e.g. "bt", "static", "bt:trees/custom.tree",
// "curriculum:runs/curriculum.params",
// "hybrid:combat=runs/combat.params,flee=runs/flee.params,tree=trees/x.tree".
inline AgentSpec parse_agent_spec(const std::string& text) {
  AgentSpec spec;
  spec.descriptor = text;
  std::string head = text, rest;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    head = text.substr(0, colon);
    rest = text.substr(colon + 1);
  }
  if (head == "bt") {
    spec.kind = AgentKind::BT;
    spec.tree_file = rest;
  } else if (head == "static") {
    spec.kind = AgentKind::Static;
  } else if (head == "no-model") {
    spec.kind = AgentKind::NoModel;
  } else if (head == "aggressive") {
    spec.kind = AgentKind::Aggressive;
    spec.tree_file = rest;
  } else if (head == "curriculum") {
    spec.kind = AgentKind::Curriculum;
    spec.model_file = rest;
  } else if (head == "hybrid") {
    spec.kind = AgentKind::Hybrid;
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw HarnessError("hybrid spec items must look like task=file: '" + item + "'");
      }
      std::string key = item.substr(0, eq), value = item.substr(eq + 1);
      if (key == "tree") {
        spec.tree_file = value;
      } else {
        bool known = false;
        for (bt::TaskKind task : {bt::TaskKind::Combat, bt::TaskKind::Search, bt::TaskKind::Flee,
                                  bt::TaskKind::Hide, bt::TaskKind::Collect}) {
          if (key == bt::task_name(task)) {
            spec.policy_files[task] = value;
            known = true;
          }
        }
        if (!known) throw HarnessError("unknown hybrid task '" + key + "'");
      }
    }
  } else {
    throw HarnessError("unknown agent kind '" + head + "'");
  }
  return spec;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw HarnessError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline bt::BehaviorTree tree_for(const AgentSpec& spec) {
  if (!spec.tree_file.empty()) return bt::parse_tree(read_file(spec.tree_file));
  return bt::parse_tree(spec.kind == AgentKind::Aggressive ? bt::aggressive_tree_source()
                                                           : bt::default_tree_source());
}

inline PolicyParams<float> params_for(const NetworkSpec& net, const std::string& file,
                                      std::uint64_t init_seed) {
  if (file.empty()) return init_params<float>(net, init_seed);
  return load_params<float>(file, net);
}

}  // namespace detail

// Builds the controller for a spec. Hybrid installs a policy on every leaf
// named in policy_files; with none named, all five leaves get (seeded)
// randomly initialized policies, which benchmarks use for cost-realistic
// timing without trained weights.
inline std::unique_ptr<Controller> make_controller(const AgentSpec& spec) {
  switch (spec.kind) {
    case AgentKind::Static:
    case AgentKind::NoModel:
      return std::make_unique<StaticController>();
    case AgentKind::BT:
    case AgentKind::Aggressive:
      return std::make_unique<BTController>(detail::tree_for(spec), spec.sensors);
    case AgentKind::Hybrid: {
      auto bt_ctrl = std::make_unique<BTController>(detail::tree_for(spec), spec.sensors);
      std::map<bt::TaskKind, std::string> leaves = spec.policy_files;
      if (leaves.empty()) {
        for (bt::TaskKind task : {bt::TaskKind::Combat, bt::TaskKind::Search, bt::TaskKind::Flee,
                                  bt::TaskKind::Hide, bt::TaskKind::Collect}) {
          leaves[task] = "";
        }
      }
      for (const auto& [task, file] : leaves) {
        Skill skill = skill_for_task(task);
        NetworkSpec net = net_spec_for_skill(skill);
        bt_ctrl->install_policy(
            task, net,
            detail::params_for(net, file, mix_seed(spec.init_seed, static_cast<int>(task))),
            observation_set_for(skill));
      }
      return bt_ctrl;
    }
    case AgentKind::Curriculum: {
      NetworkSpec net = curriculum_net_spec();
      return std::make_unique<PolicyController>(
          net, detail::params_for(net, spec.model_file, spec.init_seed),
          curriculum_observation_set(), spec.sensors);
    }
  }
  return std::make_unique<StaticController>();
}

// ---------------------------------------------------------------------------
// Matches

struct MatchResult {
  int winner = -1;  // agent index, -1 on timeout (or the vanishing draw)
  long steps = 0;
  std::array<int, 2> damage_dealt{0, 0};
  bool restarted = false;
};

struct MatchSink {
  std::string* world_trace = nullptr;       // per-step canonical snapshots
  std::string* tick_trace = nullptr;        // per-step controller traces
};

constexpr long kMatchRestartSteps = 10000;

inline MatchResult run_match(const AgentSpec& spec_a, const AgentSpec& spec_b,
                             ArenaConfig arena, std::uint64_t seed,
                             const MatchSink& sink = {}, long max_steps = kMatchRestartSteps) {
  arena.agents.assign(2, AgentSpawnSpec{});
  arena.agents[0].team = 0;
  arena.agents[1].team = 1;
  arena.agents[0].unlimited_ammo = spec_a.unlimited_ammo();
  arena.agents[1].unlimited_ammo = spec_b.unlimited_ammo();
  WorldState world = spawn_episode(arena, seed);

  std::array<std::unique_ptr<Controller>, 2> controllers{make_controller(spec_a),
                                                         make_controller(spec_b)};
  controllers[0]->reset();
  controllers[1]->reset();

  MatchResult result;
  if (sink.world_trace) append_world_text(world, *sink.world_trace);
  while (result.steps < max_steps) {
    std::map<AgentId, ActionCommand> actions;
    for (int i = 0; i < 2; ++i) {
      if (world.agents[static_cast<std::size_t>(i)].alive()) {
        actions[i] = controllers[static_cast<std::size_t>(i)]->act(world, i);
      }
    }
    step(world, actions);
    result.steps += 1;
    if (sink.world_trace) append_world_text(world, *sink.world_trace);
    if (sink.tick_trace) {
      for (int i = 0; i < 2; ++i) {
        if (const bt::TickTrace* t = controllers[static_cast<std::size_t>(i)]->last_trace()) {
          *sink.tick_trace += "step " + std::to_string(result.steps) + " agent " +
                              std::to_string(i) + " " + t->to_text() + "\n";
        }
      }
    }
    bool a_dead = !world.agents[0].alive();
    bool b_dead = !world.agents[1].alive();
    if (a_dead || b_dead) {
      result.winner = a_dead && b_dead ? -1 : (a_dead ? 1 : 0);
      break;
    }
  }
  if (result.winner == -1 && result.steps >= max_steps) result.restarted = true;
  result.damage_dealt = {world.agents[0].damage_dealt, world.agents[1].damage_dealt};
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EpisodeSample {
  int episode = 0;
  std::uint64_t seed = 0;
  int winner = -1;
  long steps = 0;
  int damage_a = 0;
  int damage_b = 0;
};

struct EvalReport {
  std::string setting;
  int episodes = 0;
  double win_rate = 0.0;     // agent A
  double mean_steps = 0.0;   // counted (non-restarted) episodes
  double mean_damage = 0.0;  // agent A damage dealt
  long restarts = 0;
  double restart_fraction = 0.0;
  std::vector<EpisodeSample> samples;
  std::vector<long> win_lengths;
  std::vector<long> loss_lengths;
};

// Runs n_episodes matches under derived seeds. Restarted episodes are re-run
// with fresh seeds (they only contribute to the restart fraction).
inline EvalReport evaluate(const AgentSpec& spec_a, const AgentSpec& spec_b,
                           const ArenaConfig& arena, int n_episodes, std::uint64_t base_seed,
                           const std::string& setting = "") {
  if (n_episodes <= 0) throw HarnessError("evaluate needs at least one episode");
  EvalReport report;
  report.setting =
      setting.empty() ? std::string(agent_kind_name(spec_a.kind)) + "_vs_" +
                            agent_kind_name(spec_b.kind)
                      : setting;
  report.episodes = n_episodes;
  long restart_counter = 0;
  double steps_sum = 0.0, damage_sum = 0.0;
  long wins = 0;
  for (int i = 0; i < n_episodes; ++i) {
    MatchResult m;
    std::uint64_t seed = mix_seed(base_seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100) throw HarnessError("episode restarts did not terminate");
      m = run_match(spec_a, spec_b, arena, seed);
      if (!m.restarted) break;
      restart_counter += 1;
      seed = mix_seed(base_seed, 0x40000000ull + static_cast<std::uint64_t>(restart_counter));
    }
    EpisodeSample s;
    s.episode = i;
    s.seed = seed;
    s.winner = m.winner;
    s.steps = m.steps;
    s.damage_a = m.damage_dealt[0];
    s.damage_b = m.damage_dealt[1];
    report.samples.push_back(s);
    if (m.winner == 0) {
      wins += 1;
      report.win_lengths.push_back(m.steps);
    } else {
      report.loss_lengths.push_back(m.steps);
    }
    steps_sum += static_cast<double>(m.steps);
    damage_sum += static_cast<double>(m.damage_dealt[0]);
  }
  report.win_rate = static_cast<double>(wins) / n_episodes;
  report.mean_steps = steps_sum / n_episodes;
  report.mean_damage = damage_sum / n_episodes;
  report.restarts = restart_counter;
  report.restart_fraction =
      static_cast<double>(restart_counter) / static_cast<double>(n_episodes + restart_counter);
  return report;
}

inline std::string eval_summary_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "setting,episodes,win_rate,mean_steps,mean_damage,restarts,restart_fraction\n";
  os.precision(10);
  for (const auto& r : reports) {
    os << r.setting << ',' << r.episodes << ',' << r.win_rate << ',' << r.mean_steps << ','
       << r.mean_damage << ',' << r.restarts << ',' << r.restart_fraction << '\n';
  }
  return os.str();
}

inline std::string samples_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "setting,episode,seed,winner,steps,damage_a,damage_b\n";
  for (const auto& r : reports) {
    for (const auto& s : r.samples) {
      os << r.setting << ',' << s.episode << ',' << s.seed << ',' << s.winner << ',' << s.steps
         << ',' << s.damage_a << ',' << s.damage_b << '\n';
    }
  }
  return os.str();
}

struct LabeledSample {
  std::string setting;
  EpisodeSample sample;
};

inline std::vector<LabeledSample> parse_samples_csv(std::istream& in) {
  std::vector<LabeledSample> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  if (line != "setting,episode,seed,winner,steps,damage_a,damage_b") {
    throw HarnessError("unrecognized samples CSV header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    LabeledSample ls;
    std::string field;
    std::getline(ss, ls.setting, ',');
    std::getline(ss, field, ',');
    ls.sample.episode = std::stoi(field);
    std::getline(ss, field, ',');
    ls.sample.seed = std::stoull(field);
    std::getline(ss, field, ',');
    ls.sample.winner = std::stoi(field);
    std::getline(ss, field, ',');
    ls.sample.steps = std::stol(field);
    std::getline(ss, field, ',');
    ls.sample.damage_a = std::stoi(field);
    std::getline(ss, field, ',');
    ls.sample.damage_b = std::stoi(field);
    out.push_back(std::move(ls));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Episode-length histograms (CSV + a minimal SVG per setting)

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  long wins = 0;
  long losses = 0;
};

inline std::vector<HistogramBin> bin_lengths(const std::vector<long>& wins,
                                             const std::vector<long>& losses, int n_bins) {
  long max_len = 1;
  for (long v : wins) max_len = std::max(max_len, v);
  for (long v : losses) max_len = std::max(max_len, v);
  std::vector<HistogramBin> bins(static_cast<std::size_t>(n_bins));
  double width = static_cast<double>(max_len) / n_bins;
  for (int i = 0; i < n_bins; ++i) {
    bins[static_cast<std::size_t>(i)].lo = i * width;
    bins[static_cast<std::size_t>(i)].hi = (i + 1) * width;
  }
  auto drop = [&](long v, bool win) {
    int idx = std::min(n_bins - 1, static_cast<int>(static_cast<double>(v) / width));
    if (win) {
      bins[static_cast<std::size_t>(idx)].wins += 1;
    } else {
      bins[static_cast<std::size_t>(idx)].losses += 1;
    }
  };
  for (long v : wins) drop(v, true);
  for (long v : losses) drop(v, false);
  return bins;
}

inline std::string histogram_csv(const std::string& setting,
                                 const std::vector<HistogramBin>& bins) {
  std::ostringstream os;
  os << "setting,bin_lo,bin_hi,wins,losses\n";
  os.precision(10);
  for (const auto& b : bins) {
    os << setting << ',' << b.lo << ',' << b.hi << ',' << b.wins << ',' << b.losses << '\n';
  }
  return os.str();
}

inline std::string histogram_svg(const std::string& setting,
                                 const std::vector<HistogramBin>& bins) {
  const int w = 640, h = 360, margin = 40;
  long peak = 1;
  for (const auto& b : bins) peak = std::max({peak, b.wins, b.losses});
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\">\n";
  os << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
     << setting << " episode lengths (wins light, losses dark)</text>\n";
  double bw = static_cast<double>(w - 2 * margin) / static_cast<double>(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) {
    double x = margin + static_cast<double>(i) * bw;
    double wh = static_cast<double>(bins[i].wins) / static_cast<double>(peak) * (h - 2 * margin);
    double lh =
        static_cast<double>(bins[i].losses) / static_cast<double>(peak) * (h - 2 * margin);
    os << "<rect x=\"" << x << "\" y=\"" << h - margin - wh << "\" width=\"" << bw * 0.45
       << "\" height=\"" << wh << "\" fill=\"#7db7e8\"/>\n";
    os << "<rect x=\"" << x + bw * 0.5 << "\" y=\"" << h - margin - lh << "\" width=\""
       << bw * 0.45 << "\" height=\"" << lh << "\" fill=\"#2c4a6e\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// Writes per-setting histogram CSVs and SVGs for win/loss episode lengths.
inline std::vector<std::string> export_histograms(const std::vector<LabeledSample>& samples,
                                                  const std::string& out_dir, int n_bins = 20) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::map<std::string, std::pair<std::vector<long>, std::vector<long>>> grouped;
  for (const auto& ls : samples) {
    auto& g = grouped[ls.setting];
    if (ls.sample.winner == 0) {
      g.first.push_back(ls.sample.steps);
    } else {
      g.second.push_back(ls.sample.steps);
    }
  }
  std::vector<std::string> written;
  for (const auto& [setting, g] : grouped) {
    auto bins = bin_lengths(g.first, g.second, n_bins);
    std::string csv_path = (fs::path(out_dir) / (setting + "_lengths.csv")).string();
    std::string svg_path = (fs::path(out_dir) / (setting + "_lengths.svg")).string();
    std::ofstream(csv_path, std::ios::binary) << histogram_csv(setting, bins);
    std::ofstream(svg_path, std::ios::binary) << histogram_svg(setting, bins);
    written.push_back(csv_path);
    written.push_back(svg_path);
  }
  if (grouped.empty()) {
    std::string csv_path = (fs::path(out_dir) / "empty_lengths.csv").string();
    std::ofstream(csv_path, std::ios::binary) << "setting,bin_lo,bin_hi,wins,losses\n";
    written.push_back(csv_path);
  }
  return written;
}

// ---------------------------------------------------------------------------
// Throughput

struct BenchResult {
  std::string setting;
  int n_agents = 0;
  long n_steps = 0;
  double mean_sps = 0.0;
  double std_sps = 0.0;
  std::vector<double> samples;
};

// Wall-clock steps/second of single-threaded stepping with n_agents
// controllers of the given kind in the evaluation arena. Damage is disabled
// so the scene stays constant-cost; each repeat re-runs the same seeded
// world.
inline BenchResult bench_throughput(const AgentSpec& spec, int n_agents, long n_steps,
                                    int repeats, ArenaConfig arena, std::uint64_t seed) {
  arena.damage_per_hit = 0;
  arena.spawn.min_separation = 0.0;
  arena.agents.assign(static_cast<std::size_t>(n_agents), AgentSpawnSpec{});
  for (auto& a : arena.agents) a.unlimited_ammo = spec.unlimited_ammo();

  BenchResult result;
  result.setting = agent_kind_name(spec.kind);
  result.n_agents = n_agents;
  result.n_steps = n_steps;
  for (int rep = 0; rep < repeats; ++rep) {
    WorldState world = spawn_episode(arena, seed);
    std::vector<std::unique_ptr<Controller>> controllers;
    for (int i = 0; i < n_agents; ++i) {
      controllers.push_back(make_controller(spec));
      controllers.back()->reset();
    }
    auto t0 = std::chrono::steady_clock::now();
    std::map<AgentId, ActionCommand> actions;
    for (long t = 0; t < n_steps; ++t) {
      actions.clear();
      for (int i = 0; i < n_agents; ++i) {
        actions[i] = controllers[static_cast<std::size_t>(i)]->act(world, i);
      }
      step(world, actions);
    }
    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    result.samples.push_back(static_cast<double>(n_steps) / secs);
  }
  double mean = 0.0;
  for (double s : result.samples) mean += s;
  mean /= static_cast<double>(result.samples.size());
  double var = 0.0;
  for (double s : result.samples) var += (s - mean) * (s - mean);
  result.mean_sps = mean;
  result.std_sps = result.samples.size() > 1
                       ? std::sqrt(var / static_cast<double>(result.samples.size() - 1))
                       : 0.0;
  return result;
}

inline std::string bench_csv(const std::vector<BenchResult>& results,
                             const std::string& machine = "") {
  std::ostringstream os;
  os << "setting,n_agents,n_steps,mean_steps_per_second,std_steps_per_second,samples,machine\n";
  os.precision(10);
  for (const auto& r : results) {
    os << r.setting << ',' << r.n_agents << ',' << r.n_steps << ',' << r.mean_sps << ','
       << r.std_sps << ',';
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      if (i) os << ';';
      os << r.samples[i];
    }
    os << ',' << machine << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Replay traces

struct MatchTrace {
  std::string header;
  std::string world_text;
  std::string tick_log;
  std::uint64_t hash = 0;
  MatchResult result;

  std::string to_text() const {
    return header + world_text + "hash " + to_hex(hash) + "\n";
  }

  static std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
  }
};

inline MatchTrace trace_match(const AgentSpec& spec_a, const AgentSpec& spec_b,
                              const ArenaConfig& arena, std::uint64_t seed,
                              long max_steps = kMatchRestartSteps) {
  MatchTrace trace;
  MatchSink sink;
  sink.world_trace = &trace.world_text;
  sink.tick_trace = &trace.tick_log;
  trace.result = run_match(spec_a, spec_b, arena, seed, sink, max_steps);
  std::ostringstream header;
  header << "skirmish-match-trace v1\n";
  header << "seed " << seed << '\n';
  header << "spec-a " << spec_a.descriptor << '\n';
  header << "spec-b " << spec_b.descriptor << '\n';
  header << "steps " << trace.result.steps << " winner " << trace.result.winner << '\n';
  trace.header = header.str();
  trace.hash = fnv1a(trace.world_text);
  return trace;
}

// Re-simulates the match named in the trace header and checks both the
// stored hash and the stored snapshot text.
inline bool verify_match_trace(const std::string& content, const ArenaConfig& arena,
                               std::string* why = nullptr) {
  std::istringstream in(content);
  std::string line;
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (!std::getline(in, line) || line != "skirmish-match-trace v1") {
    return fail("bad trace header");
  }
  std::uint64_t seed = 0;
  std::string spec_a_text, spec_b_text;
  long steps = 0;
  int winner = 0;
  if (!std::getline(in, line) || line.rfind("seed ", 0) != 0) return fail("missing seed");
  seed = std::stoull(line.substr(5));
  if (!std::getline(in, line) || line.rfind("spec-a ", 0) != 0) return fail("missing spec-a");
  spec_a_text = line.substr(7);
  if (!std::getline(in, line) || line.rfind("spec-b ", 0) != 0) return fail("missing spec-b");
  spec_b_text = line.substr(7);
  if (!std::getline(in, line) || line.rfind("steps ", 0) != 0) return fail("missing steps");
  {
    std::stringstream ss(line);
    std::string tag;
    ss >> tag >> steps >> tag >> winner;
  }
  std::string stored_body, stored_hash;
  std::string rest;
  while (std::getline(in, line)) {
    if (line.rfind("hash ", 0) == 0) {
      stored_hash = line.substr(5);
      break;
    }
    stored_body += line;
    stored_body += '\n';
  }
  if (stored_hash.empty()) return fail("missing hash line");

  MatchTrace fresh = trace_match(parse_agent_spec(spec_a_text), parse_agent_spec(spec_b_text),
                                 arena, seed);
  if (MatchTrace::to_hex(fresh.hash) != stored_hash) return fail("hash mismatch");
  if (fresh.world_text != stored_body) return fail("snapshot mismatch");
  if (fresh.result.steps != steps || fresh.result.winner != winner) {
    return fail("result mismatch");
  }
  if (why) *why = "ok";
  return true;
}

}  // namespace skirmish
