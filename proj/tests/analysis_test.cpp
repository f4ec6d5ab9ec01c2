#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "wforge/analysis/report.hpp"
#include "wforge/core.hpp"

using namespace wforge;
using namespace wforge::analysis;

namespace {

PositionSet positions(std::initializer_list<Position> ps) { return PositionSet(ps); }

}  // namespace

TEST(AffectedPositions, NoExistentialsMeansNothingAffected) {
  Program p = parse("@input e\nt(X,Y) :- e(X,Y).\nt(X,Z) :- t(X,Y), e(Y,Z).");
  EXPECT_TRUE(affected_positions(p).empty());
}

TEST(AffectedPositions, TwoStepFixpoint) {
  Program p = parse("q(X,?Z) :- p(X).\nr(B,A) :- q(A,B).");
  EXPECT_EQ(affected_positions(p), positions({{"q", 2}, {"r", 1}}));
}

TEST(AffectedPositions, EdbOnlyRulesAddNothing) {
  Program p = parse("@input e\n@input g\nq(X,?Z) :- p(X).\nr(B,A) :- q(A,B).");
  auto before = affected_positions(p);
  Program more = parse("@input e\n@input g\nq(X,?Z) :- p(X).\nr(B,A) :- q(A,B).\nh(X,Y) :- e(X), g(Y).");
  EXPECT_EQ(affected_positions(more), before);
}

TEST(Classify, ZeroAffectedOccurrencesIsHarmless) {
  Program p = parse("@input e\nq(X) :- e(X).");
  auto c = classify(p, affected_positions(p));
  EXPECT_EQ(c.at({"r1", "X"}), VariableClass::Harmless);
}

TEST(Classify, OneNonAffectedOccurrenceMakesHarmless) {
  Program p = parse("@input s\nq(X,?Z) :- p(X).\nt(Y) :- q(X,Y), s(Y).");
  auto c = classify(p, affected_positions(p));
  EXPECT_EQ(c.at({"r2", "Y"}), VariableClass::Harmless);
}

TEST(Classify, AllAffectedAndInHeadIsDangerous) {
  // r[2] is affected through the third rule
  Program p = parse("q(X,?Z) :- p(X).\nr(W,Y) :- q(W,Y).\nt(Y) :- q(X,Y), r(W,Y).");
  auto aff = affected_positions(p);
  ASSERT_TRUE(aff.contains(Position{"r", 2}));
  auto c = classify(p, aff);
  EXPECT_EQ(c.at({"r3", "Y"}), VariableClass::Dangerous);
  EXPECT_TRUE(is_harmful(c.at({"r3", "Y"})));
}

TEST(Warded, NoDangerousVariables) {
  Program p = parse(fixtures::kHuBranch);
  auto res = is_warded(p);
  EXPECT_TRUE(res.warded);
  EXPECT_TRUE(res.violations.empty());
}

TEST(Warded, HarmfulHarmfulJoinWithJoinVariableInHead) {
  Program p = parse("@input e\ns1: p(X,?Z) :- e(X).\nrho: out(X,Y) :- p(X,Y), p(W,Y).");
  auto res = is_warded(p);
  EXPECT_FALSE(res.warded);
  ASSERT_EQ(res.violations.size(), 1u);
  EXPECT_EQ(res.violations[0].rule, "rho");
  EXPECT_EQ(res.violations[0].variable, "Y");
}

TEST(Warded, OrderInsensitive) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Program p = fixtures::random_program(rng);
    auto a = is_warded(p);
    std::shuffle(p.rules.begin(), p.rules.end(), rng);
    auto b = is_warded(p);
    EXPECT_EQ(a.warded, b.warded);
    EXPECT_EQ(a.violations.size(), b.violations.size());
  }
}

TEST(HarmfulJoins, DatalogHasNone) {
  Program p = parse("@input e\nt(X,Y) :- e(X,Y).\nt(X,Z) :- t(X,Y), e(Y,Z).");
  EXPECT_TRUE(harmful_joins(p).empty());
}

TEST(HarmfulJoins, HuBranchShape) {
  auto hj = harmful_joins(parse(fixtures::kHuBranch));
  ASSERT_EQ(hj.size(), 1u);
  EXPECT_EQ(hj[0].rule, "rho");
  EXPECT_EQ(hj[0].variable, "Y");
  EXPECT_EQ(hj[0].atoms, (std::vector<std::size_t>{0, 1}));
}

TEST(CauseGraph, HuBranchGammas) {
  auto g = cause_graph(parse(fixtures::kHuBranch));
  EXPECT_EQ(g.gamma.at({"rho", 0}), (std::set<std::string>{"s1"}));
  EXPECT_EQ(g.gamma.at({"rho", 1}), (std::set<std::string>{"s1", "s2"}));
  EXPECT_EQ(g.edges.at({"rho", 1}), (std::vector<CauseEdge>{{"s2", false}}));
  EXPECT_EQ(g.edges.at({"s2", 0}), (std::vector<CauseEdge>{{"s1", true}}));
}

TEST(CauseGraph, AllEdbBodiesHaveNoCauses) {
  auto g = cause_graph(parse("@input e\n@input f\nq(X) :- e(X,Y), f(Y,X)."));
  EXPECT_TRUE(g.gamma.empty());
  EXPECT_TRUE(g.edges.empty());
}

TEST(CauseGraph, KdFamilyBranchesByK) {
  for (int k = 1; k <= 3; ++k) {
    Program p = parse(fixtures::kd_family(k, 2));
    auto g = cause_graph(p);
    EXPECT_EQ(g.edges.at({"rho", 1}).size(), static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
      auto& e = g.edges.at({"s2_" + std::to_string(i), 0});
      EXPECT_EQ(e.size(), static_cast<std::size_t>(k));
      for (const auto& c : e) EXPECT_FALSE(c.direct);
    }
  }
}

TEST(DhMdh, HuBranchWorkedExample) {
  Program p = parse(fixtures::kHuBranch);
  auto r = dh_mdh(p, *p.find_rule("rho"));
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].multiset(), (std::vector<std::string>{"s1", "s1", "s2"}));
  EXPECT_EQ(r.candidates[0].dh(), 3u);
  EXPECT_EQ(r.mdh, 3u);
}

TEST(DhMdh, SharedDirectCauseContributesOncePerAtom) {
  Program p = parse(fixtures::kSharedDirect);
  auto r = dh_mdh(p, *p.find_rule("rho"));
  ASSERT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.candidates[0].multiset(), (std::vector<std::string>{"s1", "s1"}));
  EXPECT_EQ(r.mdh, 2u);
}

TEST(DhMdh, NotHarmfulJoin) {
  Program p = parse(fixtures::kHuBranch);
  EXPECT_THROW(dh_mdh(p, *p.find_rule("s2")), NotHarmfulJoin);
}

TEST(DhMdh, KdFamilyEnumeration) {
  // brute force: every root-to-leaf path through the k-ary cause tree is one
  // candidate; each has the direct cause of p0, d indirect causes and delta.
  for (int k = 1; k <= 3; ++k)
    for (int d = 1; d <= 3; ++d) {
      Program p = parse(fixtures::kd_family(k, d));
      auto r = dh_mdh(p, *p.find_rule("rho"));
      std::size_t s = 1;
      for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(k);
      EXPECT_EQ(r.candidates.size(), s) << k << "," << d;
      EXPECT_EQ(r.mdh, static_cast<std::size_t>(d + 2));
    }
  Program p = parse(fixtures::kd_family(2, 2));
  auto r = dh_mdh(p, *p.find_rule("rho"));
  ASSERT_EQ(r.candidates.size(), 4u);
  EXPECT_EQ(r.candidates[0].sequence,
            (std::vector<std::string>{"delta", "s2_1", "s1_1_1", "delta"}));
  EXPECT_EQ(r.candidates[3].sequence,
            (std::vector<std::string>{"delta", "s2_2", "s1_2_2", "delta"}));
}

TEST(DhMdh, RecursiveChainsCutAtRevisit) {
  Program p = parse(fixtures::kRecursiveBeta);
  auto r = dh_mdh(p, *p.find_rule("rho"));
  std::vector<std::vector<std::string>> seqs;
  for (const auto& c : r.candidates) seqs.push_back(c.sequence);
  EXPECT_EQ(seqs, (std::vector<std::vector<std::string>>{{"delta", "sigma", "delta"},
                                                         {"delta", "beta", "sigma", "delta"},
                                                         {"delta", "beta", "beta"}}));
  EXPECT_EQ(r.mdh, 4u);
}

TEST(Properties, AffectedMonotoneUnderRuleAddition) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    Program p = fixtures::random_program(rng);
    Program extra = fixtures::random_program(rng, 2);
    auto before = affected_positions(p);
    for (auto r : extra.rules) {
      r.id = "x" + r.id;
      p.rules.push_back(r);
    }
    auto after = affected_positions(p);
    EXPECT_TRUE(std::includes(after.begin(), after.end(), before.begin(), before.end()));
  }
}

TEST(Properties, ClassifyTotalAndHarmfulJoinsAgree) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    Program p = fixtures::random_program(rng);
    auto aff = affected_positions(p);
    auto classes = classify(p, aff);
    std::size_t total = 0;
    bool harmful_multi = false;
    for (const auto& r : p.rules) {
      for (const auto& v : body_vars(r)) {
        ASSERT_TRUE(classes.contains({r.id, v}));
        ++total;
        std::size_t holders = 0;
        for (const auto& a : r.body)
          if (atom_has_var(a, v)) ++holders;
        if (is_harmful(classes.at({r.id, v})) && holders >= 2) harmful_multi = true;
      }
    }
    EXPECT_EQ(classes.size(), total);
    EXPECT_EQ(harmful_joins(p, aff).empty(), !harmful_multi);
  }
}

TEST(Properties, MdhAtLeastOneAndDeterministic) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    Program p = fixtures::random_program(rng);
    auto a = analyze(p);
    auto b = analyze(p);
    EXPECT_EQ(a.affected, b.affected);
    EXPECT_EQ(a.harmful_joins, b.harmful_joins);
    ASSERT_EQ(a.per_harmful_rule.size(), b.per_harmful_rule.size());
    for (std::size_t k = 0; k < a.per_harmful_rule.size(); ++k) {
      EXPECT_GE(a.per_harmful_rule[k].dh.mdh, 1u);
      EXPECT_EQ(a.per_harmful_rule[k].dh.mdh, b.per_harmful_rule[k].dh.mdh);
    }
  }
}

TEST(StructuralCounts, JoinKinds) {
  Program p = parse(
      "@input e\n@input g\n"
      "a: p(X,?Z) :- e(X).\n"
      "b: q(X,Y) :- p(X,Y), g(X,W).\n"    // harmless join on X
      "c: r(X,W) :- p(X,Y), g(Y,W).\n"    // harmless-harmful on Y
      "d: s(X,W) :- p(X,Y), p(W,Y).\n"    // harmful-harmful on Y
      "f: q(W,Y) :- q(X,Y), g(X,W), X > 2.\n");
  auto c = structural_counts(p);
  EXPECT_EQ(c.linear, 1u);
  EXPECT_EQ(c.harmless_joins, 2u);
  EXPECT_EQ(c.harmless_harmful_joins, 1u);
  EXPECT_EQ(c.harmful_harmful_joins, 1u);
  EXPECT_EQ(c.existential, 1u);
  EXPECT_EQ(c.recursive_direct, 1u);
  EXPECT_EQ(c.recursive_indirect, 0u);
  EXPECT_EQ(c.conditions, 1u);
  Program cyc = parse("@input e\na: p(X,Y) :- e(X,Y).\nb: q(X,Y) :- p(X,Y).\nc: p(X,Y) :- q(X,Y).");
  auto cc = structural_counts(cyc);
  EXPECT_EQ(cc.recursive_indirect, 2u);
  EXPECT_EQ(cc.recursive_direct, 0u);
}
