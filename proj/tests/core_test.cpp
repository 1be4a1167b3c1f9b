#include <gtest/gtest.h>

#include <random>

#include "cstn/core.hpp"
#include "support/generators.hpp"

namespace cstn {
namespace {

TEST(Label, EvaluatesOnTotalScenario) {
  // p = 0, q = 1 in index order; s = {p:1, q:0}
  const Scenario s(0b01, 2);
  EXPECT_EQ(label_holds(s, Label{{0, true}, {1, false}}), Truth::True);
  EXPECT_EQ(label_holds(s, Label{{0, false}}), Truth::False);
}

TEST(Label, EmptyLabelAlwaysHolds) {
  for (std::uint64_t i = 0; i < 4; ++i) EXPECT_EQ(label_holds(Scenario(i, 2), Label{}), Truth::True);
  EXPECT_EQ(label_holds(PartialScenario{}, Label{}), Truth::True);
}

TEST(Label, UndeterminedOnPartialScenario) {
  PartialScenario h;
  h.assign(0, true);
  EXPECT_EQ(label_holds(h, Label{{0, true}, {1, true}}), Truth::Undetermined);
  EXPECT_EQ(label_holds(h, Label{{0, false}, {1, true}}), Truth::False);
}

TEST(Label, RejectsComplementaryLiterals) {
  EXPECT_THROW((Label{{3, true}, {3, false}}), ValidationError);
  EXPECT_NO_THROW((Label{{3, true}, {3, true}}));
}

TEST(Label, CanonicalEquality) {
  EXPECT_EQ((Label{{0, true}, {2, false}}), (Label{{2, false}, {0, true}}));
  EXPECT_NE((Label{{0, true}}), (Label{{0, false}}));
}

TEST(Label, ImpliesIsLiteralContainment) {
  const Label pq{{0, true}, {1, true}};
  EXPECT_TRUE(pq.implies(Label{{0, true}}));
  EXPECT_TRUE(pq.implies(Label{}));
  EXPECT_FALSE(Label{}.implies(Label{{0, true}}));
  EXPECT_FALSE(pq.conjoin(Label{{1, false}}).has_value());
}

TEST(Label, MonotoneUnderCompletion) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t dom = rng() & 0xF;
    const PartialScenario h(PropSet::from_bits(dom), PropSet::from_bits(rng()));
    Label l;
    for (std::size_t p = 0; p < 4; ++p) {
      const auto r = rng() % 3;
      if (r < 2) l.add({p, r == 1});
    }
    const Truth t = label_holds(h, l);
    if (t == Truth::Undetermined) continue;
    for_each_completion(h, 4, [&](const Scenario& s) { EXPECT_EQ(label_holds(s, l), t); });
  }
}

TEST(Scenario, FlipIsInvolutionOrIdentity) {
  const Scenario s(0b101, 3);
  EXPECT_EQ(s.with(0, true), s);
  EXPECT_EQ(s.with(1, true).with(1, false), s);
  EXPECT_NE(s.with(1, true), s);
}

TEST(Scenario, CompletionsEnumerateCompatibleScenarios) {
  PartialScenario h;
  h.assign(1, true);
  std::vector<std::uint64_t> seen;
  for_each_completion(h, 3, [&](const Scenario& s) { seen.push_back(s.index()); });
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{0b010, 0b011, 0b110, 0b111}));
}

Cstn two_tasks(std::int64_t ba, std::optional<std::int64_t> ab = std::nullopt) {
  CstnBuilder b;
  const auto a = b.add_task("A");
  const auto bb = b.add_task("B");
  b.add_constraint(bb, a, ba);
  if (ab) b.add_constraint(a, bb, *ab);
  return b.build();
}

TEST(Project, EmptyLabelsKeepEveryTask) {
  CstnBuilder b;
  b.add_task("A");
  const auto o = b.add_task("O");
  b.add_proposition("p", o);
  const Cstn g = b.build();
  for (std::uint64_t i = 0; i < 2; ++i) EXPECT_EQ(project(g, Scenario(i, 1)).tasks, g.all_tasks());
}

TEST(Project, DropsConstraintWithFalseLabel) {
  CstnBuilder b;
  const auto a = b.add_task("A");
  const auto o = b.add_task("O");
  b.add_proposition("p", o);
  b.add_constraint(a, o, 1, {{0, true}});
  const Cstn g = b.build();
  EXPECT_TRUE(project(g, Scenario(0, 1)).constraints.empty());
  ASSERT_EQ(project(g, Scenario(1, 1)).constraints.size(), 1U);
}

TEST(Project, EndpointsAlwaysInProjectedTasks) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Cstn g = gen::micro_cstn(rng);
    for (std::uint64_t i = 0; i < scenario_count(g.num_props()); ++i) {
      const Stn st = project(g, Scenario(i, g.num_props()));
      for (const auto& c : st.constraints) {
        EXPECT_TRUE(st.tasks.contains(c.from));
        EXPECT_TRUE(st.tasks.contains(c.to));
      }
      EXPECT_EQ(st, project(g, Scenario(i, g.num_props())));
    }
  }
}

TEST(Wd1, EmptyTaskLabelsAreFine) { EXPECT_TRUE(validate_wd1(two_tasks(1)).empty()); }

TEST(Wd1, UnlabeledConstraintOnLabeledTaskIsRejected) {
  CstnBuilder b;
  const auto x = b.add_task("X");
  const auto y = b.add_task("Y");
  const auto o = b.add_task("O");
  b.add_proposition("p", o);
  b.set_task_label(x, {{0, true}});
  b.add_constraint(y, x, 0);
  EXPECT_EQ(wd1_violations(b.constraints(), b.task_labels()), std::vector<std::size_t>{0});
  EXPECT_THROW(b.build(), ValidationError);
}

TEST(Builder, ValidatesStructure) {
  {
    CstnBuilder b;
    b.add_task("A");
    b.add_task("A");
    EXPECT_THROW(b.build(), ValidationError);
  }
  {
    CstnBuilder b;
    const auto a = b.add_task("A");
    b.add_proposition("p", a);
    b.add_proposition("q", a);
    EXPECT_THROW(b.build(), ValidationError);
  }
  {
    CstnBuilder b;
    b.add_task("A");
    b.add_proposition("p", 5);
    EXPECT_THROW(b.build(), ValidationError);
  }
  {
    CstnBuilder b;
    const auto a = b.add_task("A");
    const auto c = b.add_task("C");
    b.add_constraint(c, a, 3);
    b.set_bound(2);
    EXPECT_THROW(b.build(), ValidationError);
  }
  {
    CstnBuilder b;
    b.add_task("bad name");
    EXPECT_THROW(b.build(), ValidationError);
  }
  {
    CstnBuilder b;
    b.add_task("A");
    b.set_unit(Rational(0));
    EXPECT_THROW(b.build(), ValidationError);
  }
}

TEST(Builder, DefaultBoundIsLargestMagnitude) {
  EXPECT_EQ(two_tasks(-3, 2).bound(), 3);
  CstnBuilder b;
  b.add_task("A");
  EXPECT_EQ(b.build().bound(), 1);
}

TEST(ScheduleSatisfies, EqualTimesMeetZeroBound) {
  const Cstn g = two_tasks(0);
  Schedule psi(2);
  psi.set(0, 4).set(1, 4);
  EXPECT_FALSE(schedule_satisfies(psi, project(g, Scenario(0, 0))));
}

TEST(ScheduleSatisfies, ReportsViolatedConstraint) {
  const Cstn g = two_tasks(1);
  Schedule psi(2, Rational(1));
  psi.set(0, 1).set(1, 3);
  EXPECT_EQ(schedule_satisfies(psi, project(g, Scenario(0, 0))), std::optional<std::size_t>(0));
}

TEST(ScheduleSatisfies, ComparesAcrossTickAndUnit) {
  // w = 1/2, tick = 1/4: B - A = 3 ticks = 3/4 > 1 * 1/2.
  CstnBuilder b;
  const auto a = b.add_task("A");
  const auto c = b.add_task("B");
  b.add_constraint(c, a, 1);
  b.set_unit(Rational(1, 2));
  const Cstn g = b.build();
  Schedule psi(2, Rational(1, 4));
  psi.set(a, 1).set(c, 3);
  EXPECT_FALSE(schedule_satisfies(psi, project(g, Scenario(0, 0))));
  psi.set(c, 4);
  EXPECT_TRUE(schedule_satisfies(psi, project(g, Scenario(0, 0))));
}

TEST(ScheduleSatisfies, MissingEndpointIsDomainError) {
  const Cstn g = two_tasks(1);
  Schedule psi(2);
  psi.set(0, 1);
  EXPECT_THROW(schedule_satisfies(psi, project(g, Scenario(0, 0))), DomainError);
}

}  // namespace
}  // namespace cstn
