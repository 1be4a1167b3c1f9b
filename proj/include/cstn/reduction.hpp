#pragma once

// Q3SAT -> CSTN hardness gadgets.
//
// Gadget i (i = 1..n) has tasks A_i, B_i, C_i^0, C_i^1, D_i, X_i, Y_i and
// propositions x_i, y_i, c_i^0, c_i^1 observed by X_i, Y_i, C_i^0, C_i^1. Two
// extra tasks A_{n+1}, B_{n+1} carry one constraint per clause. The planner
// nominates a value for x_i by executing C_i^0 or C_i^1 early; if nature
// disagrees, every later gadget is switched off and the planner schedules the
// rest far in the future. All task labels are empty, w = 1 and W = n + 4.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cstn/core.hpp"
#include "cstn/qbf.hpp"
#include "cstn/strategy.hpp"

namespace cstn {

// Task and proposition indices of the gadget network for n levels.
struct GadgetLayout {
  int n = 0;

  std::size_t A(int i) const { return i == n + 1 ? 7 * sz(n) : 7 * sz(i - 1); }
  std::size_t B(int i) const { return i == n + 1 ? 7 * sz(n) + 1 : 7 * sz(i - 1) + 1; }
  std::size_t C(int i, int h) const { return 7 * sz(i - 1) + 2 + sz(h); }
  std::size_t D(int i) const { return 7 * sz(i - 1) + 4; }
  std::size_t X(int i) const { return 7 * sz(i - 1) + 5; }
  std::size_t Y(int i) const { return 7 * sz(i - 1) + 6; }
  std::size_t num_tasks() const { return 7 * sz(n) + 2; }

  std::size_t x(int i) const { return 4 * sz(i - 1); }
  std::size_t y(int i) const { return 4 * sz(i - 1) + 1; }
  std::size_t c(int i, int h) const { return 4 * sz(i - 1) + 2 + sz(h); }
  std::size_t num_props() const { return 4 * sz(n); }

  // Proposition standing for formula variable v (see QLiteral).
  std::size_t prop_of_var(int v) const { return v % 2 == 0 ? x(v / 2 + 1) : y(v / 2 + 1); }

  // (n + 4)(n + 2): the late time used for tasks that no longer matter.
  std::int64_t late() const { return std::int64_t(n + 4) * (n + 2); }
  // (n + 4) i: start of gadget i.
  std::int64_t start(int i) const { return std::int64_t(n + 4) * i; }

 private:
  static std::size_t sz(int v) { return static_cast<std::size_t>(v); }
};

enum class GadgetRole { Activation, DEarly, DLate, XDelay, YDelay, Chain, Propagate0, Propagate1, Clause };

inline const char* to_string(GadgetRole r) {
  switch (r) {
    case GadgetRole::Activation: return "activation";
    case GadgetRole::DEarly: return "D-early";
    case GadgetRole::DLate: return "D-late";
    case GadgetRole::XDelay: return "X-delay";
    case GadgetRole::YDelay: return "Y-delay";
    case GadgetRole::Chain: return "chain";
    case GadgetRole::Propagate0: return "propagate-0";
    case GadgetRole::Propagate1: return "propagate-1";
    case GadgetRole::Clause: return "clause";
  }
  return "?";
}

struct GadgetTag {
  GadgetRole role = GadgetRole::Activation;
  int gadget = 0;  // 1..n; n + 1 for clause constraints
  int clause = 0;  // 1..m for clause constraints
  friend bool operator==(const GadgetTag&, const GadgetTag&) = default;
};

inline std::string describe(const GadgetTag& tag) {
  std::string s = "gadget " + std::to_string(tag.gadget) + " " + to_string(tag.role);
  if (tag.role == GadgetRole::Clause) s += " " + std::to_string(tag.clause);
  return s;
}

struct ReductionInstance {
  GadgetLayout layout;
  Cstn cstn;
  std::vector<GadgetTag> annotations;  // one per constraint, same order
  std::vector<int> dropped_clauses;    // 1-based indices of tautological clauses
};

inline ReductionInstance reduce(const Q3SatFormula& phi) {
  phi.validate();
  const int n = phi.n;
  const GadgetLayout L{n};
  if (L.num_tasks() > kMaxTasks) throw CapacityError("formula too large for a 64-task network");

  CstnBuilder b;
  for (int i = 1; i <= n; ++i) {
    const std::string s = std::to_string(i);
    b.add_task("A" + s);
    b.add_task("B" + s);
    b.add_task("C" + s + "_0");
    b.add_task("C" + s + "_1");
    b.add_task("D" + s);
    b.add_task("X" + s);
    b.add_task("Y" + s);
  }
  b.add_task("A" + std::to_string(n + 1));
  b.add_task("B" + std::to_string(n + 1));
  for (int i = 1; i <= n; ++i) {
    const std::string s = std::to_string(i);
    b.add_proposition("x" + s, L.X(i));
    b.add_proposition("y" + s, L.Y(i));
    b.add_proposition("c" + s + "_0", L.C(i, 0));
    b.add_proposition("c" + s + "_1", L.C(i, 1));
  }

  ReductionInstance out;
  out.layout = L;
  auto add = [&](std::size_t to, std::size_t from, std::int64_t bound, Label label, GadgetTag tag) {
    b.add_constraint(to, from, bound, label);
    out.annotations.push_back(tag);
  };
  const std::int64_t n2 = n + 2;
  const std::int64_t n4 = n + 4;

  add(L.B(1), L.A(1), 0, {}, {GadgetRole::Activation, 1, 0});
  for (int i = 1; i <= n; ++i) {
    // D_i <= B_i + 1 when both c's hold; D_i >= A_i + (n + 2) when neither does.
    add(L.D(i), L.B(i), 1, {{L.c(i, 0), true}, {L.c(i, 1), true}}, {GadgetRole::DEarly, i, 0});
    add(L.A(i), L.D(i), -n2, {{L.c(i, 0), false}, {L.c(i, 1), false}}, {GadgetRole::DLate, i, 0});
    add(L.A(i), L.X(i), -n2, {}, {GadgetRole::XDelay, i, 0});
    add(L.X(i), L.Y(i), -1, {}, {GadgetRole::YDelay, i, 0});
    add(L.Y(i), L.A(i + 1), -1, {}, {GadgetRole::Chain, i, 0});
    add(L.B(i + 1), L.C(i, 0), n4, {{L.x(i), false}}, {GadgetRole::Propagate0, i, 0});
    add(L.B(i + 1), L.C(i, 1), n4, {{L.x(i), true}}, {GadgetRole::Propagate1, i, 0});
  }
  for (std::size_t j = 0; j < phi.clauses.size(); ++j) {
    const Clause& cl = phi.clauses[j];
    if (Q3SatFormula::tautological(cl)) {
      out.dropped_clauses.push_back(static_cast<int>(j + 1));
      continue;
    }
    Label neg;
    for (const auto& lit : cl) neg.add({L.prop_of_var(lit.var), !lit.positive});
    // B_{n+1} - A_{n+1} >= n + 1 under the negated clause.
    add(L.A(n + 1), L.B(n + 1), -(n + 1), neg, {GadgetRole::Clause, n + 1, static_cast<int>(j + 1)});
  }
  b.set_bound(n4);
  out.cstn = b.build();
  return out;
}

namespace detail {

class WitnessBuilder {
 public:
  WitnessBuilder(const Cstn& g, const GadgetLayout& L, const ExistentialStrategy& f) : g_(g), L_(L), f_(f) {}

  TreeNode gadget(int i, std::uint64_t ys, bool active, TaskSet remaining) const {
    const int n = L_.n;
    const std::int64_t t = L_.start(i);
    if (i == n + 1) {
      TaskSet exec = TaskSet::single(L_.A(n + 1));
      if (active) exec.insert(L_.B(n + 1));
      return TreeNode::action(t, exec, {finish(remaining - exec)});
    }
    if (!active) {
      const TaskSet exec = TaskSet::single(L_.A(i));
      return TreeNode::action(t, exec, {observe_x(i, ys, false, 0, remaining - exec)});
    }
    // Nominate x_i = h by running C_i^h with A_i and B_i; run D_i one unit
    // later only if c_i^h turned out true.
    const int h = f_.choose(i, ys) ? 1 : 0;
    TaskSet exec = TaskSet::single(L_.A(i));
    exec.insert(L_.B(i));
    exec.insert(L_.C(i, h));
    const TaskSet rest = remaining - exec;
    std::vector<TreeNode> kids;
    kids.push_back(observe_x(i, ys, true, h, rest));
    kids.push_back(
        TreeNode::action(t + 1, TaskSet::single(L_.D(i)), {observe_x(i, ys, true, h, rest - TaskSet::single(L_.D(i)))}));
    return TreeNode::action(t, exec, std::move(kids));
  }

 private:
  TreeNode observe_x(int i, std::uint64_t ys, bool active, int h, TaskSet remaining) const {
    const int n = L_.n;
    const std::int64_t t = L_.start(i);
    const TaskSet xs = TaskSet::single(L_.X(i));
    const TaskSet yset = TaskSet::single(L_.Y(i));
    std::vector<TreeNode> on_x;
    for (int x = 0; x < 2; ++x) {
      std::vector<TreeNode> on_y;
      for (int y = 0; y < 2; ++y)
        on_y.push_back(gadget(i + 1, ys | (std::uint64_t(y) << (i - 1)), active && x == h, remaining - xs - yset));
      on_x.push_back(TreeNode::action(t + n + 3, yset, std::move(on_y)));
    }
    return TreeNode::action(t + n + 2, xs, std::move(on_x));
  }

  TreeNode finish(TaskSet remaining) const {
    if (remaining.empty()) return TreeNode::leaf();
    const std::size_t outcomes = std::size_t{1} << g_.props_observed_by(remaining).size();
    return TreeNode::action(L_.late(), remaining, std::vector<TreeNode>(outcomes, TreeNode::leaf()));
  }

  const Cstn& g_;
  const GadgetLayout& L_;
  const ExistentialStrategy& f_;
};

}  // namespace detail

// Tree strategy for reduce(phi) driven by the existential table f: A_i at
// (n+4)i; while nature has copied every nominated x so far, B_i and the
// nominated C_i^h also at (n+4)i and D_i one unit later when c_i^h is true;
// X_i and Y_i at (n+4)i + n + 2 and + n + 3; B_{n+1} at (n+4)(n+1) if nature
// copied throughout. Everything else runs at (n+4)(n+2). Time unit 1.
inline TreeStrategy witness_strategy(const Q3SatFormula& phi, const ExistentialStrategy& f) {
  phi.validate();
  if (f.tables.size() != static_cast<std::size_t>(phi.n)) throw DomainError("existential table has the wrong depth");
  for (int i = 0; i < phi.n; ++i)
    if (f.tables[i].size() != (std::size_t{1} << i)) throw DomainError("existential table has the wrong width");
  const ReductionInstance inst = reduce(phi);
  detail::WitnessBuilder wb(inst.cstn, inst.layout, f);
  return TreeStrategy{Rational(1), wb.gadget(1, 0, true, inst.cstn.all_tasks())};
}

struct AdversaryResult {
  Scenario scenario;
  std::size_t constraint = 0;
};

namespace detail {

// (later - earlier) * tick compared against a number of units of w = 1.
inline Rational span(const Schedule& row, std::size_t later, std::size_t earlier) {
  return Rational(*row.at(later) - *row.at(earlier)) * row.tick();
}

}  // namespace detail

// Nature's play against sigma on reduce(phi) when phi is false and g wins for
// the universal player: set x_{I+1} to the value sigma nominates (0 iff
// C^0_{I+1} runs before B_{I+1} + 1) and y_{I+1} by g, then report a
// constraint that sigma violates in the final scenario. nullopt means no
// violation was found there, in which case sigma is not dynamic.
inline std::optional<AdversaryResult> adversary(const Q3SatFormula& phi, const UniversalStrategy& g,
                                                const TableStrategy& sigma) {
  const ReductionInstance inst = reduce(phi);
  const GadgetLayout& L = inst.layout;
  if (sigma.num_props() != inst.cstn.num_props()) throw DomainError("strategy is not over the reduction network");
  if (g.tables.size() != static_cast<std::size_t>(phi.n)) throw DomainError("universal table has the wrong depth");

  Scenario s(0, inst.cstn.num_props());
  std::uint64_t xs = 0;
  for (int I = 0; I < phi.n; ++I) {
    const Schedule& row = sigma.row(s);
    const int h = detail::span(row, L.C(I + 1, 0), L.B(I + 1)) < 1 ? 0 : 1;
    xs |= std::uint64_t(h) << I;
    s = s.with(L.x(I + 1), h).with(L.y(I + 1), g.choose(I + 1, xs));
  }
  const Stn proj = project(inst.cstn, s);
  if (auto bad = schedule_satisfies(sigma.row(s), proj)) return AdversaryResult{s, proj.constraints[*bad].origin};
  return std::nullopt;
}

struct GadgetViolation {
  Scenario scenario;
  int gadget = 0;
};

// If B_i - A_i <= n in sigma(s) then some C_i^h runs no later than B_i + 1.
inline std::optional<GadgetViolation> check_gadget_choice(const ReductionInstance& inst, const TableStrategy& sigma) {
  const GadgetLayout& L = inst.layout;
  for (std::uint64_t k = 0; k < sigma.rows().size(); ++k) {
    const Schedule& row = sigma.rows()[k];
    for (int i = 1; i <= L.n; ++i) {
      if (detail::span(row, L.B(i), L.A(i)) > L.n) continue;
      if (detail::span(row, L.C(i, 0), L.B(i)) > 1 && detail::span(row, L.C(i, 1), L.B(i)) > 1)
        return GadgetViolation{Scenario(k, inst.cstn.num_props()), i};
    }
  }
  return std::nullopt;
}

// If gadget i is activated in sigma(s) (B_i - A_i <= i - 1) and nature copies
// the nominated value into x_i, then B_{i+1} - A_{i+1} <= i.
inline std::optional<GadgetViolation> check_activation_propagation(const ReductionInstance& inst,
                                                                   const TableStrategy& sigma) {
  const GadgetLayout& L = inst.layout;
  for (std::uint64_t k = 0; k < sigma.rows().size(); ++k) {
    const Scenario s(k, inst.cstn.num_props());
    const Schedule& row = sigma.row(s);
    for (int i = 1; i <= L.n; ++i) {
      if (detail::span(row, L.B(i), L.A(i)) > i - 1) continue;
      const int h = detail::span(row, L.C(i, 0), L.B(i)) < 1 ? 0 : 1;
      const Schedule& copied = sigma.row(s.with(L.x(i), h));
      if (detail::span(copied, L.B(i + 1), L.A(i + 1)) > i) return GadgetViolation{s, i};
    }
  }
  return std::nullopt;
}

// Graphviz rendering: an edge N -> M labelled "d,l" is the constraint
// M <= N + d under label l; observation tasks are annotated "q?".
inline void write_dot(std::ostream& os, const ReductionInstance& inst) {
  const Cstn& g = inst.cstn;
  os << "digraph gamma {\n  rankdir=LR;\n";
  for (std::size_t t = 0; t < g.num_tasks(); ++t) {
    os << "  \"" << g.task_name(t) << "\"";
    if (auto p = g.observed_prop(t)) os << " [xlabel=\"" << g.prop_name(*p) << "?\"]";
    os << ";\n";
  }
  for (std::size_t i = 0; i < g.constraints().size(); ++i) {
    const auto& c = g.constraints()[i];
    std::string label = std::to_string(c.bound);
    if (!c.label.empty()) label += "," + format_label(g, c.label);
    os << "  \"" << g.task_name(c.from) << "\" -> \"" << g.task_name(c.to) << "\" [label=\"" << label
       << "\", tag=\"" << describe(inst.annotations[i]) << "\"];\n";
  }
  os << "}\n";
}

}  // namespace cstn
