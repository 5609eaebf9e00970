#pragma once

// Behavior-tree engine: selector/sequence composites over condition and task
// leaves, a small s-expression DSL, and per-tick traces.
//
// Tick semantics: a Selector returns its first child's non-Failure status, a
// Sequence its first child's non-Success status. Conditions return
// Success/Failure; a Task leaf asks the task runner for an action and
// returns Running, which short-circuits every composite above it, so at most
// one task executes per tick.
//
// DSL grammar (s-expressions):
//   node      := composite | condition | task | "(" "not" condition ")"
//   composite := "(" ("selector" | "sequence") node+ ")"
//   condition := "(" "dist-lt" number ")" | "(" "dist-gt" number ")"
//              | "(" "in-sight" ")" | "(" "healthy" ")" | "(" "ammo-empty" ")"
//   task      := "(" "task" name ")",  name in {combat, search, flee, hide, collect}
//
// Condition meanings (opponent = the agent's designated target):
//   dist-lt t   distance to opponent < t    dist-gt t   distance > t
//   in-sight    line of sight to opponent
//   healthy     health >= half max AND trailing-window minimum >= half max
//   ammo-empty  ammunition count == 0

#include <cctype>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "skirmish/arena.hpp"

namespace skirmish::bt {

enum class Status : std::uint8_t { Success, Failure, Running };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Success: return "success";
    case Status::Failure: return "failure";
    case Status::Running: return "running";
  }
  return "?";
}

enum class NodeKind : std::uint8_t { Selector, Sequence, Condition, Task };
enum class ConditionKind : std::uint8_t { Distance, InSight, Healthy, AmmoEmpty };
enum class TaskKind : std::uint8_t { Combat, Search, Flee, Hide, Collect };

inline const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::Combat: return "combat";
    case TaskKind::Search: return "search";
    case TaskKind::Flee: return "flee";
    case TaskKind::Hide: return "hide";
    case TaskKind::Collect: return "collect";
  }
  return "?";
}

struct Node {
  NodeKind kind = NodeKind::Task;
  int id = 0;  // preorder index, assigned at parse time
  std::vector<Node> children;

  // Condition payload.
  ConditionKind condition = ConditionKind::InSight;
  bool negated = false;
  double threshold = 0.0;
  bool less_than = true;

  // Task payload.
  TaskKind task = TaskKind::Search;
};

struct BehaviorTree {
  Node root;
  int node_count = 0;
  std::string source;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                           ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

// ---------------------------------------------------------------------------
// Parser

namespace detail {

struct Token {
  enum Kind { LParen, RParen, Atom, End } kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == ';') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    if (pos_ >= src_.size()) return {Token::End, "", line_, col_};
    int line = line_, col = col_;
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ++col_;
      return {Token::LParen, "(", line, col};
    }
    if (c == ')') {
      ++pos_;
      ++col_;
      return {Token::RParen, ")", line, col};
    }
    std::size_t start = pos_;
    while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
           src_[pos_] != '(' && src_[pos_] != ')' && src_[pos_] != ';') {
      ++pos_;
      ++col_;
    }
    return {Token::Atom, src_.substr(start, pos_ - start), line, col};
  }

 private:
  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lexer_(src) { advance(); }

  Node parse_root() {
    Node n = parse_node();
    if (tok_.kind != Token::End) fail("trailing input after tree");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, tok_.line, tok_.col); }
  void advance() { tok_ = lexer_.next(); }

  Token expect(Token::Kind k, const std::string& what) {
    if (tok_.kind != k) fail("expected " + what);
    Token t = tok_;
    advance();
    return t;
  }

  Node parse_node() {
    expect(Token::LParen, "'('");
    Token head = expect(Token::Atom, "node kind");
    Node n;
    if (head.text == "selector" || head.text == "sequence") {
      n.kind = head.text == "selector" ? NodeKind::Selector : NodeKind::Sequence;
      while (tok_.kind == Token::LParen) n.children.push_back(parse_node());
      if (n.children.empty()) {
        throw ParseError("'" + head.text + "' needs at least one child", head.line, head.col);
      }
      expect(Token::RParen, "')'");
    } else if (head.text == "not") {
      Node child = parse_node();
      if (child.kind != NodeKind::Condition) {
        throw ParseError("'not' takes exactly one condition", head.line, head.col);
      }
      expect(Token::RParen, "')'");
      child.negated = !child.negated;
      return child;
    } else if (head.text == "dist-lt" || head.text == "dist-gt") {
      n.kind = NodeKind::Condition;
      n.condition = ConditionKind::Distance;
      n.less_than = head.text == "dist-lt";
      Token num = expect(Token::Atom, "distance threshold");
      try {
        std::size_t used = 0;
        n.threshold = std::stod(num.text, &used);
        if (used != num.text.size()) throw std::invalid_argument("");
      } catch (...) {
        throw ParseError("malformed number '" + num.text + "'", num.line, num.col);
      }
      expect(Token::RParen, "')'");
    } else if (head.text == "in-sight" || head.text == "healthy" || head.text == "ammo-empty") {
      n.kind = NodeKind::Condition;
      n.condition = head.text == "in-sight"  ? ConditionKind::InSight
                    : head.text == "healthy" ? ConditionKind::Healthy
                                             : ConditionKind::AmmoEmpty;
      expect(Token::RParen, "')'");
    } else if (head.text == "task") {
      n.kind = NodeKind::Task;
      Token name = expect(Token::Atom, "task name");
      if (name.text == "combat") {
        n.task = TaskKind::Combat;
      } else if (name.text == "search") {
        n.task = TaskKind::Search;
      } else if (name.text == "flee") {
        n.task = TaskKind::Flee;
      } else if (name.text == "hide") {
        n.task = TaskKind::Hide;
      } else if (name.text == "collect") {
        n.task = TaskKind::Collect;
      } else {
        throw ParseError("unknown task '" + name.text + "'", name.line, name.col);
      }
      expect(Token::RParen, "')'");
    } else {
      throw ParseError("unknown node kind '" + head.text + "'", head.line, head.col);
    }
    return n;
  }

  Lexer lexer_;
  Token tok_{Token::End, "", 0, 0};
};

inline int assign_ids(Node& n, int next) {
  n.id = next++;
  for (auto& c : n.children) next = assign_ids(c, next);
  return next;
}

}  // namespace detail

inline BehaviorTree parse_tree(const std::string& source) {
  detail::Parser p(source);
  BehaviorTree tree;
  tree.root = p.parse_root();
  tree.node_count = detail::assign_ids(tree.root, 0);
  tree.source = source;
  return tree;
}

// ---------------------------------------------------------------------------
// Blackboard and traces

struct Blackboard {
  std::optional<Vec2> last_seen_target;
  long last_seen_step = -1;

  std::optional<Vec2> eqs_point;
  long eqs_step = -1;
  TaskKind eqs_task = TaskKind::Flee;

  std::vector<Vec2> path;
  std::size_t path_index = 0;
  long path_step = -1;
  Vec2 path_goal;

  // Stall recovery for path following: steps spent pinned near stall_anchor.
  Vec2 stall_anchor;
  int stall_steps = 0;

  static constexpr int kRequeryInterval = 15;  // steps between EQS / path refreshes
};

struct TickTrace {
  struct Entry {
    int node_id;
    Status status;
  };
  std::vector<Entry> entries;
  bool no_task_reached = false;
  int active_task_node = -1;
  std::optional<TaskKind> active_task;

  std::string to_text() const {
    std::string out;
    for (const auto& e : entries) {
      out += std::to_string(e.node_id);
      out += ':';
      out += status_name(e.status);
      out += ' ';
    }
    if (!out.empty()) out.pop_back();
    if (no_task_reached) out += " no-task";
    return out;
  }
};

// ---------------------------------------------------------------------------
// Ticking

// Core composite algebra, generic over leaf evaluation so tests can drive it
// with scripted statuses. cond(node) -> bool, task(node) -> Status.
template <typename CondFn, typename TaskFn>
Status tick_node(const Node& node, CondFn&& cond, TaskFn&& task, TickTrace& trace) {
  std::size_t slot = trace.entries.size();
  trace.entries.push_back({node.id, Status::Failure});
  Status result = Status::Failure;
  switch (node.kind) {
    case NodeKind::Selector: {
      result = Status::Failure;
      for (const auto& c : node.children) {
        Status s = tick_node(c, cond, task, trace);
        if (s != Status::Failure) {
          result = s;
          break;
        }
      }
      break;
    }
    case NodeKind::Sequence: {
      result = Status::Success;
      for (const auto& c : node.children) {
        Status s = tick_node(c, cond, task, trace);
        if (s != Status::Success) {
          result = s;
          break;
        }
      }
      break;
    }
    case NodeKind::Condition:
      result = cond(node) ? Status::Success : Status::Failure;
      break;
    case NodeKind::Task:
      result = task(node);
      break;
  }
  trace.entries[slot].status = result;
  return result;
}

inline const AgentState* opponent_of(const WorldState& world, const AgentState& agent) {
  const AgentState* t = world.find_agent(agent.target);
  return (t && t->id != agent.id) ? t : nullptr;
}

// Condition evaluation against the live world. Without a designated
// opponent, Distance and InSight evaluate false.
inline bool eval_condition(const Node& node, const WorldState& world, AgentId agent_id) {
  const AgentState* agent = world.find_agent(agent_id);
  if (!agent) throw ArenaError("eval_condition: no such agent");
  bool value = false;
  switch (node.condition) {
    case ConditionKind::Distance: {
      if (const AgentState* opp = opponent_of(world, *agent)) {
        double d = distance(agent->position, opp->position);
        value = node.less_than ? d < node.threshold : d > node.threshold;
      }
      break;
    }
    case ConditionKind::InSight: {
      if (const AgentState* opp = opponent_of(world, *agent)) {
        value = line_of_sight(world, agent->position, opp->position);
      }
      break;
    }
    case ConditionKind::Healthy: {
      int half = world.config.start_health / 2;
      value = agent->health >= half && agent->health_history_min() >= half;
      break;
    }
    case ConditionKind::AmmoEmpty:
      value = agent->ammo == 0;
      break;
  }
  return node.negated ? !value : value;
}

// Refreshes observational blackboard state; call once per step before tick.
inline void observe(const WorldState& world, AgentId agent_id, Blackboard& bb) {
  const AgentState* agent = world.find_agent(agent_id);
  if (!agent) return;
  if (const AgentState* opp = opponent_of(world, *agent)) {
    if (opp->alive() && line_of_sight(world, agent->position, opp->position)) {
      bb.last_seen_target = opp->position;
      bb.last_seen_step = world.step;
    }
  }
}

using TaskRunner =
    std::function<ActionCommand(TaskKind, const WorldState&, AgentId, Blackboard&)>;

struct TickResult {
  ActionCommand action;
  TickTrace trace;
};

// Depth-first tick. Exactly one task leaf produces the action; if no task is
// reached the action is a no-op and the trace is flagged.
inline TickResult tick(const BehaviorTree& tree, Blackboard& blackboard, const WorldState& world,
                       AgentId agent_id, const TaskRunner& runner) {
  TickResult out;
  auto cond = [&](const Node& n) { return eval_condition(n, world, agent_id); };
  auto task = [&](const Node& n) {
    out.action = runner(n.task, world, agent_id, blackboard);
    out.trace.active_task_node = n.id;
    out.trace.active_task = n.task;
    return Status::Running;
  };
  tick_node(tree.root, cond, task, out.trace);
  if (!out.trace.active_task.has_value()) out.trace.no_task_reached = true;
  return out;
}

// ---------------------------------------------------------------------------
// Built-in trees. The hybrid and pure-BT agents share these files; whether a
// task leaf is scripted or policy-driven is the runner's choice, not the
// tree's.

inline const char* default_tree_source() {
  return R"((selector
  (sequence (not (healthy))
    (selector
      (sequence (dist-lt 1000) (task flee))
      (task hide)))
  (sequence (ammo-empty) (task collect))
  (sequence (in-sight) (task combat))
  (task search))
)";
}

// The aggressive variant never flees or hides.
inline const char* aggressive_tree_source() {
  return R"((selector
  (sequence (ammo-empty) (task collect))
  (sequence (in-sight) (task combat))
  (task search))
)";
}

}  // namespace skirmish::bt
