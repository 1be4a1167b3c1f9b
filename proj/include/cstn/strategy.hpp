#pragma once

// Execution strategies and their definitional checks.
//
// Two representations: TableStrategy is a dense scenario -> schedule map and
// is what the verifiers consume. TreeStrategy is a decision tree of next
// actions branching on observation outcomes; it is dynamic by construction and
// is what the solver and the reduction produce. tree_to_table converts one way.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cstn/core.hpp"

namespace cstn {

class IncompleteStrategyError : public Error {
 public:
  using Error::Error;
};

// Dense tables are desk-scale only.
inline constexpr std::size_t kMaxTableProps = 20;

class TableStrategy {
 public:
  TableStrategy() = default;

  // rows[i] is the schedule for the scenario with index i; its domain must be
  // exactly the tasks executed in that scenario.
  TableStrategy(const Cstn& g, Rational tick, std::vector<Schedule> rows)
      : num_props_(g.num_props()), tick_(tick), rows_(std::move(rows)) {
    if (num_props_ > kMaxTableProps) throw CapacityError("too many propositions for a dense strategy table");
    if (rows_.size() != scenario_count(num_props_)) throw DomainError("strategy table must have one row per scenario");
    for (std::uint64_t i = 0; i < rows_.size(); ++i) {
      const Schedule& r = rows_[i];
      if (r.num_tasks() != g.num_tasks()) throw DomainError("strategy row has the wrong number of tasks");
      if (r.tick() != tick_) throw DomainError("strategy rows must share the table's time unit");
      if (r.domain() != g.tasks_in(Scenario(i, num_props_)))
        throw DomainError("strategy row " + std::to_string(i) + " does not cover exactly the scenario's tasks");
    }
  }

  std::size_t num_props() const { return num_props_; }
  const Rational& tick() const { return tick_; }
  const std::vector<Schedule>& rows() const { return rows_; }
  const Schedule& row(const Scenario& s) const { return rows_.at(s.index()); }

  // Moves an already scheduled task; the row's domain is unchanged.
  void retime(const Scenario& s, std::size_t task, std::int64_t k) {
    Schedule& r = rows_.at(s.index());
    if (!r.contains(task)) throw DomainError("cannot retime a task that the scenario does not execute");
    r.set(task, k);
  }

  friend bool operator==(const TableStrategy&, const TableStrategy&) = default;

 private:
  std::size_t num_props_ = 0;
  Rational tick_{1};
  std::vector<Schedule> rows_;
};

// Internal node: execute `exec` at grid index `at`, then continue with the
// child selected by the observed values of the propositions whose observation
// tasks are in `exec`. Child i corresponds to the outcome whose j-th bit is the
// value of the j-th such proposition in ascending index order.
struct TreeNode {
  bool terminal = true;
  std::int64_t at = 0;
  TaskSet exec;
  std::vector<TreeNode> children;

  static TreeNode leaf() { return {}; }
  static TreeNode action(std::int64_t at, TaskSet exec, std::vector<TreeNode> children) {
    TreeNode n;
    n.terminal = false;
    n.at = at;
    n.exec = exec;
    n.children = std::move(children);
    return n;
  }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeStrategy {
  Rational tick{1};
  TreeNode root;
  friend bool operator==(const TreeStrategy&, const TreeStrategy&) = default;
};

// Index of the child of an action observing `observed` under scenario bits.
inline std::size_t outcome_index(PropSet observed, const Scenario& s) {
  std::size_t idx = 0;
  std::size_t j = 0;
  for (std::size_t p : observed.members()) {
    if (s.value(p)) idx |= std::size_t{1} << j;
    ++j;
  }
  return idx;
}

namespace detail {

inline void check_tree_node(const Cstn& g, const TreeNode& n, std::optional<std::int64_t> prev, TaskSet done) {
  if (n.terminal) {
    if (!n.children.empty()) throw DomainError("terminal tree node has children");
    return;
  }
  if (prev && n.at <= *prev) throw DomainError("tree times must strictly increase from root to leaf");
  if (n.exec.empty()) throw DomainError("tree action executes no task");
  if (!n.exec.subset_of(g.all_tasks())) throw DomainError("tree action executes an unknown task");
  if (n.exec.intersects(done)) throw DomainError("tree executes a task twice along one path");
  const std::size_t outcomes = std::size_t{1} << g.props_observed_by(n.exec).size();
  if (n.children.size() != outcomes)
    throw DomainError("tree action has " + std::to_string(n.children.size()) + " children, expected " +
                      std::to_string(outcomes));
  for (const auto& c : n.children) check_tree_node(g, c, n.at, done | n.exec);
}

}  // namespace detail

inline void validate_tree(const Cstn& g, const TreeStrategy& tree) {
  detail::check_tree_node(g, tree.root, std::nullopt, {});
}

inline TableStrategy tree_to_table(const Cstn& g, const TreeStrategy& tree) {
  validate_tree(g, tree);
  if (g.num_props() > kMaxTableProps) throw CapacityError("too many propositions for a dense strategy table");
  const std::uint64_t count = scenario_count(g.num_props());
  std::vector<Schedule> rows;
  rows.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const Scenario s(i, g.num_props());
    Schedule psi(g.num_tasks(), tree.tick);
    const TreeNode* node = &tree.root;
    while (!node->terminal) {
      for (std::size_t t : node->exec.members()) psi.set(t, node->at);
      node = &node->children[outcome_index(g.props_observed_by(node->exec), s)];
    }
    const TaskSet need = g.tasks_in(s);
    const TaskSet have = psi.domain();
    if (!(need - have).empty())
      throw IncompleteStrategyError("leaf reached in scenario " + std::to_string(i) + " without executing task '" +
                                    g.task_name((need - have).members().front()) + "'");
    if (!(have - need).empty())
      throw DomainError("strategy executes task '" + g.task_name((have - need).members().front()) +
                        "' in scenario " + std::to_string(i) + " where its label is false");
    rows.push_back(std::move(psi));
  }
  return TableStrategy(g, tree.tick, std::move(rows));
}

struct ViabilityWitness {
  Scenario scenario;
  std::size_t constraint = 0;  // index into Cstn::constraints()
};

inline std::optional<ViabilityWitness> verify_viable(const Cstn& g, const TableStrategy& sigma) {
  if (sigma.num_props() != g.num_props()) throw DomainError("strategy and network disagree on propositions");
  for (std::uint64_t i = 0; i < sigma.rows().size(); ++i) {
    const Scenario s(i, g.num_props());
    const Stn proj = project(g, s);
    if (auto bad = schedule_satisfies(sigma.row(s), proj)) return ViabilityWitness{s, proj.constraints[*bad].origin};
  }
  return std::nullopt;
}

// Hist(t, s, sigma): propositions whose observation task ran strictly before t.
inline PartialScenario history(const Cstn& g, const TableStrategy& sigma, std::int64_t t, const Scenario& s) {
  const Schedule& row = sigma.row(s);
  PropSet dom;
  for (std::size_t p = 0; p < g.num_props(); ++p) {
    const auto at = row.at(g.observer(p));
    if (at && *at < t) dom.insert(p);
  }
  return s.restrict_to(dom);
}

struct DynamicWitness {
  Scenario scenario;
  Scenario other;
  std::size_t task = 0;
  std::int64_t time = 0;
};

// Checks: equal histories at t = [sigma(s)]_X force X to run at t in s' too.
// Returns the first counterexample in canonical (s, X, s') order.
inline std::optional<DynamicWitness> verify_dynamic(const Cstn& g, const TableStrategy& sigma) {
  if (sigma.num_props() != g.num_props()) throw DomainError("strategy and network disagree on propositions");
  const std::size_t np = g.num_props();
  const std::size_t nt = g.num_tasks();
  const std::uint64_t count = sigma.rows().size();
  constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

  // Observation times per scenario; kNever when the observer is not executed.
  std::vector<std::int64_t> obs(count * np, kNever);
  for (std::uint64_t i = 0; i < count; ++i)
    for (std::size_t p = 0; p < np; ++p)
      if (auto at = sigma.rows()[i].at(g.observer(p))) obs[i * np + p] = *at;

  auto hist_domain = [&](std::uint64_t i, std::int64_t t) {
    std::uint64_t dom = 0;
    for (std::size_t p = 0; p < np; ++p)
      if (obs[i * np + p] < t) dom |= std::uint64_t{1} << p;
    return dom;
  };

  for (std::uint64_t i = 0; i < count; ++i) {
    const Schedule& row = sigma.rows()[i];
    for (std::size_t x = 0; x < nt; ++x) {
      const auto t = row.at(x);
      if (!t) continue;
      const std::uint64_t dom = hist_domain(i, *t);
      for (std::uint64_t j = 0; j < count; ++j) {
        if (j == i) continue;
        if (hist_domain(j, *t) != dom || ((i ^ j) & dom) != 0) continue;
        if (sigma.rows()[j].at(x) != t) return DynamicWitness{Scenario(i, np), Scenario(j, np), x, *t};
      }
    }
  }
  return std::nullopt;
}

enum class FlipProperty { History, ExecutedBy, ExecutedAt, ObservationTime };

inline const char* to_string(FlipProperty p) {
  switch (p) {
    case FlipProperty::History: return "history";
    case FlipProperty::ExecutedBy: return "executed-by";
    case FlipProperty::ExecutedAt: return "executed-at";
    case FlipProperty::ObservationTime: return "observation-time";
  }
  return "?";
}

struct FlipViolation {
  FlipProperty property = FlipProperty::History;
  std::int64_t time = 0;
  std::optional<std::size_t> task;
};

// With s' = s[v/p], checks for every t <= [sigma(s)]_{O(p)} that the two
// scenarios share history, the set of tasks run by t and the set run at t, and
// that O(p) itself runs at the same time. When s does not execute O(p) there
// is nothing to check.
inline std::optional<FlipViolation> check_single_flip(const Cstn& g, const TableStrategy& sigma, const Scenario& s,
                                                      std::size_t p, bool v) {
  const Scenario s2 = s.with(p, v);
  const Schedule& a = sigma.row(s);
  const Schedule& b = sigma.row(s2);
  const std::size_t op = g.observer(p);
  const auto limit = a.at(op);
  if (!limit) return std::nullopt;

  // Between consecutive times appearing in either row nothing changes, so it
  // suffices to probe every such time and the grid step after it.
  std::set<std::int64_t> probes{*limit};
  for (std::size_t x = 0; x < g.num_tasks(); ++x)
    for (const auto& at : {a.at(x), b.at(x)})
      if (at) {
        if (*at <= *limit) probes.insert(*at);
        if (*at + 1 <= *limit) probes.insert(*at + 1);
      }

  for (std::int64_t t : probes) {
    if (history(g, sigma, t, s) != history(g, sigma, t, s2)) return FlipViolation{FlipProperty::History, t, {}};
    for (std::size_t x = 0; x < g.num_tasks(); ++x) {
      const auto ta = a.at(x);
      const auto tb = b.at(x);
      if ((ta && *ta <= t) != (tb && *tb <= t)) return FlipViolation{FlipProperty::ExecutedBy, t, x};
      if ((ta && *ta == t) != (tb && *tb == t)) return FlipViolation{FlipProperty::ExecutedAt, t, x};
    }
  }
  if (b.at(op) != limit) return FlipViolation{FlipProperty::ObservationTime, *limit, op};
  return std::nullopt;
}

}  // namespace cstn
