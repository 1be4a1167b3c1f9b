#pragma once

// Seeded random instances for property tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cstn/core.hpp"
#include "cstn/qbf.hpp"
#include "cstn/strategy.hpp"

namespace cstn::gen {

struct MicroShape {
  int max_tasks = 3;
  int max_props = 1;
  int max_abs_bound = 2;
  int max_constraints = 4;
};

// Tiny WD1-respecting network. Non-observation tasks may carry a literal on
// some proposition; each constraint label extends the endpoint labels.
inline Cstn micro_cstn(std::mt19937_64& rng, const MicroShape& shape = {}) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int nt = uni(1, shape.max_tasks);
  const int np = uni(0, std::min(shape.max_props, nt));

  CstnBuilder b;
  for (int t = 0; t < nt; ++t) b.add_task("T" + std::to_string(t));
  std::vector<int> order(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) order[static_cast<std::size_t>(t)] = t;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> observer(static_cast<std::size_t>(nt), false);
  for (int p = 0; p < np; ++p) {
    b.add_proposition("p" + std::to_string(p), static_cast<std::size_t>(order[static_cast<std::size_t>(p)]));
    observer[static_cast<std::size_t>(order[static_cast<std::size_t>(p)])] = true;
  }
  if (np > 0)
    for (int t = 0; t < nt; ++t)
      if (!observer[static_cast<std::size_t>(t)] && uni(0, 3) == 0)
        b.set_task_label(static_cast<std::size_t>(t), {{static_cast<std::size_t>(uni(0, np - 1)), uni(0, 1) == 1}});

  if (nt >= 2) {
    const int nc = uni(0, shape.max_constraints);
    for (int c = 0; c < nc; ++c) {
      const auto x = static_cast<std::size_t>(uni(0, nt - 1));
      auto y = static_cast<std::size_t>(uni(0, nt - 2));
      if (y >= x) ++y;
      auto label = b.task_labels()[x].conjoin(b.task_labels()[y]);
      if (!label) continue;
      if (np > 0 && uni(0, 2) == 0) {
        if (auto more = label->conjoin({{static_cast<std::size_t>(uni(0, np - 1)), uni(0, 1) == 1}})) label = more;
      }
      b.add_constraint(y, x, uni(-shape.max_abs_bound, shape.max_abs_bound), *label);
    }
  }
  return b.build();
}

inline Q3SatFormula random_formula(std::mt19937_64& rng, int n, int m) {
  Q3SatFormula phi;
  phi.n = n;
  std::uniform_int_distribution<int> var(0, 2 * n - 1);
  std::bernoulli_distribution pos(0.5);
  for (int j = 0; j < m; ++j) phi.clauses.push_back({QLiteral{var(rng), pos(rng)}, {var(rng), pos(rng)}, {var(rng), pos(rng)}});
  return phi;
}

// Every n = 1 formula with at most max_m clauses, as multisets of the 20
// clauses that are multisets of three literals over {x1, !x1, y1, !y1}.
inline std::vector<Q3SatFormula> all_n1_formulas(int max_m) {
  const std::vector<QLiteral> lits{{0, true}, {0, false}, {1, true}, {1, false}};
  std::vector<Clause> clauses;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a; b < 4; ++b)
      for (std::size_t c = b; c < 4; ++c) clauses.push_back({lits[a], lits[b], lits[c]});
  std::vector<Q3SatFormula> out;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    Q3SatFormula phi;
    phi.n = 1;
    for (std::size_t i : pick) phi.clauses.push_back(clauses[i]);
    out.push_back(phi);
    if (static_cast<int>(pick.size()) == max_m) return;
    for (std::size_t i = from; i < clauses.size(); ++i) {
      pick.push_back(i);
      rec(i);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

// Network with unlabeled tasks, np of which observe a proposition, and a few
// unlabeled or labeled constraints.
inline Cstn observation_network(std::mt19937_64& rng, int nt, int np) {
  CstnBuilder b;
  for (int t = 0; t < nt; ++t) b.add_task("T" + std::to_string(t));
  for (int p = 0; p < np; ++p) b.add_proposition("p" + std::to_string(p), static_cast<std::size_t>(p));
  std::uniform_int_distribution<int> task(0, nt - 1);
  for (int c = 0; c < nt; ++c) {
    const auto x = static_cast<std::size_t>(task(rng));
    const auto y = static_cast<std::size_t>(task(rng));
    if (x == y) continue;
    Label l;
    if (np > 0 && rng() % 2) l.add({rng() % static_cast<std::size_t>(np), rng() % 2 == 0});
    b.add_constraint(y, x, static_cast<std::int64_t>(rng() % 5) - 2, l);
  }
  return b.build();
}

// Random complete tree over a network whose task labels are all empty.
inline TreeNode random_tree(std::mt19937_64& rng, const Cstn& g, TaskSet rest, std::int64_t prev) {
  if (rest.empty()) return TreeNode::leaf();
  const std::int64_t at = prev + 1 + static_cast<std::int64_t>(rng() % 3);
  std::uint64_t sub = 0;
  while (sub == 0) sub = rng() & rest.bits();
  const TaskSet exec = TaskSet::from_bits(sub);
  std::vector<TreeNode> kids;
  for (std::size_t o = 0; o < (std::size_t{1} << g.props_observed_by(exec).size()); ++o)
    kids.push_back(random_tree(rng, g, rest - exec, at));
  return TreeNode::action(at, exec, std::move(kids));
}

}  // namespace cstn::gen
