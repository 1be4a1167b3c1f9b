#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "cstn/reduction.hpp"
#include "support/generators.hpp"

namespace cstn {
namespace {

const QLiteral x1{0, true}, nx1{0, false}, y1{1, true}, ny1{1, false};

std::size_t task(const Cstn& g, const std::string& name) { return *g.find_task(name); }

// Constraint Y - X <= k with the given label, found by task names.
bool has(const Cstn& g, const std::string& y, const std::string& x, std::int64_t k, const Label& l = {}) {
  for (const auto& c : g.constraints())
    if (c.to == task(g, y) && c.from == task(g, x) && c.bound == k && c.label == l) return true;
  return false;
}

TEST(Reduce, OneLevelOneClauseCounts) {
  const auto inst = reduce(Q3SatFormula{1, {{x1, y1, y1}}});
  EXPECT_EQ(inst.cstn.num_tasks(), 9U);
  EXPECT_EQ(inst.cstn.num_props(), 4U);
  EXPECT_EQ(inst.cstn.constraints().size(), 9U);
  EXPECT_EQ(inst.annotations.size(), 9U);
  EXPECT_EQ(inst.cstn.unit(), Rational(1));
  EXPECT_EQ(inst.cstn.bound(), 5);
}

TEST(Reduce, ConstraintListForOneLevel) {
  const auto inst = reduce(Q3SatFormula{1, {{x1, ny1, ny1}}});
  const Cstn& g = inst.cstn;
  const auto p = [&](const char* n) { return *g.find_prop(n); };
  EXPECT_TRUE(has(g, "B1", "A1", 0));
  EXPECT_TRUE(has(g, "D1", "B1", 1, {{p("c1_0"), true}, {p("c1_1"), true}}));
  EXPECT_TRUE(has(g, "A1", "D1", -3, {{p("c1_0"), false}, {p("c1_1"), false}}));
  EXPECT_TRUE(has(g, "A1", "X1", -3));
  EXPECT_TRUE(has(g, "X1", "Y1", -1));
  EXPECT_TRUE(has(g, "Y1", "A2", -1));
  EXPECT_TRUE(has(g, "B2", "C1_0", 5, {{p("x1"), false}}));
  EXPECT_TRUE(has(g, "B2", "C1_1", 5, {{p("x1"), true}}));
  // Clause (x1 | !y1 | !y1): negation !x1 & y1.
  EXPECT_TRUE(has(g, "A2", "B2", -2, {{p("x1"), false}, {p("y1"), true}}));

  EXPECT_EQ(g.observer(p("x1")), task(g, "X1"));
  EXPECT_EQ(g.observer(p("y1")), task(g, "Y1"));
  EXPECT_EQ(g.observer(p("c1_0")), task(g, "C1_0"));
  EXPECT_EQ(g.observer(p("c1_1")), task(g, "C1_1"));
}

TEST(Reduce, ThreeLevelTopology) {
  std::mt19937_64 rng(2);
  const auto inst = reduce(gen::random_formula(rng, 3, 4));
  const Cstn& g = inst.cstn;
  EXPECT_EQ(g.num_tasks(), 23U);
  EXPECT_EQ(g.num_props(), 12U);
  for (int i = 1; i <= 3; ++i) {
    const std::string s = std::to_string(i), t = std::to_string(i + 1);
    EXPECT_TRUE(has(g, "A" + s, "X" + s, -5));
    EXPECT_TRUE(has(g, "X" + s, "Y" + s, -1));
    EXPECT_TRUE(has(g, "Y" + s, "A" + t, -1));
    EXPECT_TRUE(has(g, "B" + t, "C" + s + "_0", 7, {{*g.find_prop("x" + s), false}}));
  }
  std::multiset<GadgetRole> roles;
  for (const auto& a : inst.annotations) roles.insert(a.role);
  EXPECT_EQ(roles.count(GadgetRole::Activation), 1U);
  EXPECT_EQ(roles.count(GadgetRole::Chain), 3U);
  EXPECT_EQ(roles.count(GadgetRole::Clause) + inst.dropped_clauses.size(), 4U);
}

TEST(Reduce, TautologicalClauseIsDropped) {
  const auto inst = reduce(Q3SatFormula{1, {{x1, nx1, y1}, {x1, x1, x1}}});
  EXPECT_EQ(inst.dropped_clauses, std::vector<int>{1});
  EXPECT_EQ(inst.cstn.constraints().size(), 9U);
  EXPECT_EQ(inst.annotations.back(), (GadgetTag{GadgetRole::Clause, 2, 2}));
}

TEST(Reduce, StructuralInvariants) {
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 5; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      const auto inst = reduce(gen::random_formula(rng, n, static_cast<int>(rng() % 11)));
      const Cstn& g = inst.cstn;
      EXPECT_TRUE(validate_wd1(g).empty());
      EXPECT_EQ(g.bound(), n + 4);
      std::int64_t max_abs = 0;
      for (const auto& c : g.constraints()) max_abs = std::max(max_abs, std::abs(c.bound));
      EXPECT_EQ(max_abs, n + 4);
      for (std::size_t t = 0; t < g.num_tasks(); ++t) EXPECT_TRUE(g.task_label(t).empty());
      for (std::uint64_t s = 0; s < 8; ++s)
        EXPECT_EQ(project(g, Scenario(rng(), g.num_props())).tasks, g.all_tasks());
    }
}

TEST(Witness, SpecificTimesForOneLevel) {
  const Q3SatFormula phi{1, {{x1, x1, x1}}};
  const auto inst = reduce(phi);
  const auto& L = inst.layout;
  const TableStrategy t = tree_to_table(inst.cstn, witness_strategy(phi, ExistentialStrategy{{{true}}}));
  for (std::uint64_t i = 0; i < 16; ++i) {
    const Scenario s(i, 4);
    const Schedule& r = t.row(s);
    EXPECT_EQ(*r.at(L.A(1)), 5);
    EXPECT_EQ(*r.at(L.B(1)), 5);
    EXPECT_EQ(*r.at(L.C(1, 1)), 5);
    EXPECT_EQ(*r.at(L.C(1, 0)), 15);
    EXPECT_EQ(*r.at(L.D(1)), s.value(L.c(1, 1)) ? 6 : 15);
    EXPECT_EQ(*r.at(L.X(1)), 8);
    EXPECT_EQ(*r.at(L.Y(1)), 9);
    EXPECT_EQ(*r.at(L.A(2)), 10);
    EXPECT_EQ(*r.at(L.B(2)), s.value(L.x(1)) ? 10 : 15);
  }
  EXPECT_FALSE(verify_viable(inst.cstn, t));
  EXPECT_FALSE(verify_dynamic(inst.cstn, t));
}

TEST(Witness, RejectsMalformedTable) {
  const Q3SatFormula phi{2, {}};
  EXPECT_THROW(witness_strategy(phi, ExistentialStrategy{{{true}}}), DomainError);
  EXPECT_THROW(witness_strategy(phi, ExistentialStrategy{{{true}, {true}}}), DomainError);
}

TEST(Adversary, FindsViolationForBothNominations) {
  const Q3SatFormula phi{1, {{x1, y1, y1}, {nx1, ny1, ny1}}};
  const auto inst = reduce(phi);
  const auto g = qbf_extract_universal(phi);
  ASSERT_TRUE(g);
  for (bool f1 : {true, false}) {
    const TableStrategy sigma = tree_to_table(inst.cstn, witness_strategy(phi, ExistentialStrategy{{{f1}}}));
    const auto hit = adversary(phi, *g, sigma);
    ASSERT_TRUE(hit);
    EXPECT_EQ(inst.annotations[hit->constraint].role, GadgetRole::Clause);
    const Stn proj = project(inst.cstn, hit->scenario);
    EXPECT_TRUE(schedule_satisfies(sigma.row(hit->scenario), proj));
    EXPECT_TRUE(verify_viable(inst.cstn, sigma));
  }
}

TEST(GadgetChecks, HoldOnWitnessStrategies) {
  std::mt19937_64 rng(19);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Q3SatFormula phi = gen::random_formula(rng, 2, 1 + static_cast<int>(rng() % 5));
    const auto f = qbf_extract_existential(phi);
    if (!f) continue;
    const auto inst = reduce(phi);
    const TableStrategy sigma = tree_to_table(inst.cstn, witness_strategy(phi, *f));
    EXPECT_FALSE(check_gadget_choice(inst, sigma));
    EXPECT_FALSE(check_activation_propagation(inst, sigma));
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(GadgetChecks, ChoiceCheckFlagsLateNomination) {
  const Q3SatFormula phi{1, {{x1, x1, x1}}};
  const auto inst = reduce(phi);
  TableStrategy sigma = tree_to_table(inst.cstn, witness_strategy(phi, ExistentialStrategy{{{true}}}));
  const Scenario s(0, 4);
  sigma.retime(s, inst.layout.C(1, 1), 7);
  const auto v = check_gadget_choice(inst, sigma);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->gadget, 1);
}

TEST(Dot, ContainsTaggedEdges) {
  const auto inst = reduce(Q3SatFormula{1, {{x1, y1, y1}}});
  std::ostringstream os;
  write_dot(os, inst);
  const std::string dot = os.str();
  EXPECT_NE(dot.find("\"A1\" -> \"B1\" [label=\"0\", tag=\"gadget 1 activation\"]"), std::string::npos);
  EXPECT_NE(dot.find("tag=\"gadget 2 clause 1\""), std::string::npos);
  EXPECT_NE(dot.find("xlabel=\"x1?\""), std::string::npos);
}

}  // namespace
}  // namespace cstn
