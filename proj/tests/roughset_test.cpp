#include <gtest/gtest.h>

#include <random>

#include "roughclus/errors.hpp"
#include "roughclus/roughset.hpp"
#include "test_support.hpp"

using namespace roughclus;
namespace ts = testing_support;

namespace {

DecisionTable table_of(std::vector<std::string> names, const std::vector<std::vector<std::string>>& rows) {
  DecisionTable t(std::move(names));
  for (const auto& r : rows) {
    const std::vector<std::string> values(r.begin(), r.end() - 1);
    t.add_row(values, r.back());
  }
  return t;
}

DecisionTable water_land() {
  return table_of({"Hue", "Int"}, {{"low", "low", "water"},
                                   {"low", "high", "water"},
                                   {"high", "low", "land"},
                                   {"high", "high", "land"}});
}

DecisionTable inconsistent_pair() {
  return table_of({"Hue", "Int"}, {{"low", "low", "water"}, {"low", "low", "land"}});
}

RowSet rows(std::size_t n, std::initializer_list<std::size_t> members) {
  RowSet s(n);
  for (std::size_t m : members) s.set(m);
  return s;
}

}  // namespace

TEST(DecisionTable, CodesInFirstAppearanceOrder) {
  const DecisionTable t = water_land();
  EXPECT_EQ(t.row_count(), 4u);
  EXPECT_EQ(t.value(0, 0), 0);
  EXPECT_EQ(t.value(2, 0), 1);
  EXPECT_EQ(t.value_token(1, 1), "high");
  EXPECT_EQ(t.decision_token(t.decision(3)), "land");
  EXPECT_EQ(t.decision_count(), 2u);
}

TEST(DecisionTable, RejectsWrongArity) {
  DecisionTable t({"a", "b"});
  const std::vector<std::string> one{"x"};
  EXPECT_THROW(t.add_row(one, "c"), DataError);
}

TEST(DecisionTable, ParsesDelimitedText) {
  const DecisionTable a = parse_decision_table("Hue,Int,class\nlow,low,water\nhigh, low ,land\n");
  const DecisionTable b = parse_decision_table("Hue Int class\n\nlow low water\nhigh\tlow land\n");
  ASSERT_EQ(a.row_count(), 2u);
  ASSERT_EQ(b.row_count(), 2u);
  EXPECT_EQ(a.attribute_names(), (std::vector<std::string>{"Hue", "Int"}));
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(a.row(r), b.row(r));
    EXPECT_EQ(a.decision_token(a.decision(r)), b.decision_token(b.decision(r)));
  }
  EXPECT_THROW(parse_decision_table("Hue,Int,label\nlow,low,water\n"), DataError);
  EXPECT_THROW(parse_decision_table("Hue,Int,class\nlow,water\n"), DataError);
  EXPECT_THROW(parse_decision_table(""), DataError);
}

TEST(Blocks, SingleRow) {
  const DecisionTable t = table_of({"a", "b"}, {{"x", "y", "c"}});
  for (const Block& b : compute_blocks(t)) EXPECT_EQ(b.members, rows(1, {0}));
}

TEST(Blocks, HueSplit) {
  const auto blocks = compute_blocks(water_land());
  ASSERT_EQ(blocks.size(), 4u);
  EXPECT_EQ(blocks[0].pair, (AVPair{0, 0}));
  EXPECT_EQ(blocks[0].members, rows(4, {0, 1}));
  EXPECT_EQ(blocks[1].pair, (AVPair{0, 1}));
  EXPECT_EQ(blocks[1].members, rows(4, {2, 3}));
}

TEST(Blocks, OneAttributePartitionsRowsOnRandomTables) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const DecisionTable t = ts::random_table(rng);
    const auto plain = ts::plain(t);
    const auto blocks = compute_blocks(t);
    for (std::size_t a = 0; a < t.attribute_count(); ++a) {
      RowSet seen(t.row_count());
      for (const Block& b : blocks) {
        if (b.pair.attribute != a) continue;
        EXPECT_FALSE(seen.intersects(b.members));
        seen |= b.members;
        EXPECT_EQ(ts::to_rows(b.members), ts::oracle_block(plain, {{a, b.pair.value}}));
      }
      EXPECT_TRUE(seen.all());
    }
  }
}

TEST(Indiscernibility, Examples) {
  const DecisionTable distinct = water_land();
  EXPECT_EQ(indiscernibility_classes(distinct).size(), 4u);

  const DecisionTable t = table_of({"a1", "a2"}, {{"low", "low", "x"}, {"low", "high", "y"}, {"low", "low", "x"}});
  const std::size_t a1[] = {0};
  const Partition p1 = indiscernibility_classes(t, a1);
  ASSERT_EQ(p1.size(), 1u);
  EXPECT_EQ(p1[0], rows(3, {0, 1, 2}));

  const Partition all = indiscernibility_classes(t);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0], rows(3, {0, 2}));
  EXPECT_EQ(all[1], rows(3, {1}));

  EXPECT_THROW(indiscernibility_classes(t, std::span<const std::size_t>{}), DataError);
}

TEST(Approximations, TrivialSets) {
  const DecisionTable t = inconsistent_pair();
  const Partition p = indiscernibility_classes(t);
  const RowSet all = t.all_rows();
  const RowSet none(t.row_count());
  EXPECT_EQ(lower_approx(all, p), all);
  EXPECT_EQ(upper_approx(all, p), all);
  EXPECT_EQ(lower_approx(none, p), none);
  EXPECT_EQ(upper_approx(none, p), none);
}

TEST(Approximations, InconsistentPair) {
  const DecisionTable t = inconsistent_pair();
  const Partition p = indiscernibility_classes(t);
  const RowSet water = compute_concepts(t)[0].members;
  EXPECT_EQ(water, rows(2, {0}));
  EXPECT_TRUE(lower_approx(water, p).none());
  EXPECT_EQ(upper_approx(water, p), rows(2, {0, 1}));
  EXPECT_EQ(boundary_region(water, p), rows(2, {0, 1}));
  EXPECT_FALSE(is_consistent(t));
}

TEST(Approximations, ConsistentTableIsExact) {
  const DecisionTable t = water_land();
  const Partition p = indiscernibility_classes(t);
  EXPECT_TRUE(is_consistent(t));
  for (const Concept& c : compute_concepts(t)) {
    EXPECT_EQ(lower_approx(c.members, p), c.members);
    EXPECT_EQ(upper_approx(c.members, p), c.members);
  }
}

TEST(Approximations, MatchOracleOnRandomSubsets) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const DecisionTable t = ts::random_table(rng);
    const auto plain = ts::plain(t);
    const Partition p = indiscernibility_classes(t);
    RowSet x(t.row_count());
    for (std::size_t r = 0; r < t.row_count(); ++r) x[r] = rng() % 2;
    const RowSet lo = lower_approx(x, p), up = upper_approx(x, p);
    EXPECT_TRUE(lo.is_subset_of(x));
    EXPECT_TRUE(x.is_subset_of(up));
    EXPECT_EQ(ts::to_rows(lo), ts::oracle_lower(plain, ts::to_rows(x)));
    EXPECT_EQ(ts::to_rows(up), ts::oracle_upper(plain, ts::to_rows(x)));
  }
}

TEST(Lem2, WaterConceptHasUniqueMinimalCovering) {
  const DecisionTable t = water_land();
  const RowSet water = compute_concepts(t)[0].members;
  const LocalCovering cov = lem2_local_covering(water, t);
  ASSERT_EQ(cov.complexes.size(), 1u);
  EXPECT_EQ(cov.complexes[0], (std::vector<AVPair>{{0, 0}}));
  EXPECT_EQ(cov.target, water);

  // Exhaustive search: {(Hue,low)} is the only minimal complex inside the concept.
  const auto minimal = ts::oracle_minimal_complexes(ts::plain(t), ts::to_rows(water));
  EXPECT_EQ(minimal, (std::set<std::set<ts::Pair>>{{{0, 0}}}));
}

TEST(Lem2, UniqueValueRow) {
  const DecisionTable t = table_of({"a", "b"}, {{"x", "p", "c1"}, {"x", "q", "c1"}, {"y", "p", "c2"}});
  const LocalCovering cov = lem2_local_covering(rows(3, {2}), t);
  ASSERT_EQ(cov.complexes.size(), 1u);
  EXPECT_EQ(cov.complexes[0], (std::vector<AVPair>{{0, 1}}));
}

TEST(Lem2, Errors) {
  const DecisionTable t = inconsistent_pair();
  const Partition p = indiscernibility_classes(t);
  const RowSet water = compute_concepts(t)[0].members;
  try {
    lem2_local_covering(lower_approx(water, p), t);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty target"), std::string::npos);
  }
  try {
    lem2_local_covering(water, t);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("uncoverable target"), std::string::npos);
  }
  const LocalCovering up = lem2_local_covering(upper_approx(water, p), t);
  EXPECT_FALSE(up.complexes.empty());
  EXPECT_EQ(complex_block(t, up.complexes[0]), rows(2, {0, 1}));
}

TEST(InduceRules, ConsistentTable) {
  const auto rules = induce_rules(water_land());
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].conditions, (std::vector<Condition>{{"Hue", "low"}}));
  EXPECT_EQ(rules[0].decision, "water");
  EXPECT_EQ(rules[0].certainty, Certainty::certain);
  EXPECT_EQ(rules[0].support, 2u);
  EXPECT_EQ(rules[1].conditions, (std::vector<Condition>{{"Hue", "high"}}));
  EXPECT_EQ(rules[1].decision, "land");
  EXPECT_EQ(rules[1].certainty, Certainty::certain);
  EXPECT_EQ(ts::check_rule_set(water_land(), rules), "");
}

TEST(InduceRules, FullyInconsistentTable) {
  const DecisionTable t = inconsistent_pair();
  const auto rules = induce_rules(t);
  std::map<std::string, int> possible;
  for (const Rule& r : rules) {
    EXPECT_EQ(r.certainty, Certainty::possible);
    EXPECT_FALSE(r.conditions.empty());
    EXPECT_EQ(r.support, 1u);
    ++possible[r.decision];
  }
  EXPECT_GE(possible["water"], 1);
  EXPECT_GE(possible["land"], 1);
  EXPECT_EQ(ts::check_rule_set(t, rules), "");
}

TEST(InduceRules, CertainRulesStayInsideTheirConcept) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const DecisionTable t = ts::random_table(rng, 12, 3, 3, 3);
    for (const Rule& r : induce_rules(t)) {
      if (r.certainty != Certainty::certain) continue;
      for (std::size_t row = 0; row < t.row_count(); ++row) {
        bool match = true;
        for (const Condition& c : r.conditions) {
          std::size_t a = 0;
          while (t.attribute_names()[a] != c.attribute) ++a;
          match = match && t.value_token(a, t.value(row, a)) == c.value;
        }
        if (match) {
          EXPECT_EQ(t.decision_token(t.decision(row)), r.decision);
        }
      }
    }
  }
}

// Covering properties against exhaustive search. Binary attributes keep the
// universe of complexes small enough to enumerate.
class Lem2Oracle : public ::testing::TestWithParam<int> {};

TEST_P(Lem2Oracle, CoveringsAreMinimalAndExact) {
  std::mt19937 rng(static_cast<unsigned>(GetParam()));
  for (int trial = 0; trial < 25; ++trial) {
    const DecisionTable t = ts::random_table(rng, 8, 3, 2, 3);
    const auto plain = ts::plain(t);
    const Partition p = indiscernibility_classes(t);
    for (const Concept& c : compute_concepts(t)) {
      for (const RowSet& target : {lower_approx(c.members, p), upper_approx(c.members, p), c.members}) {
        if (target.none() || lower_approx(target, p) != target) continue;
        const LocalCovering cov = lem2_local_covering(target, t);
        EXPECT_EQ(ts::check_covering(plain, ts::to_rows(target), cov.complexes), "");
        RowSet uni(t.row_count());
        for (const auto& cx : cov.complexes) uni |= complex_block(t, cx);
        EXPECT_EQ(uni, target);
      }
    }
    EXPECT_EQ(ts::check_rule_set(t, induce_rules(t)), "");
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, Lem2Oracle, ::testing::Range(100, 120));

TEST(InduceRules, Deterministic) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const DecisionTable t = ts::random_table(rng, 10, 3, 3, 3);
    EXPECT_EQ(induce_rules(t), induce_rules(t));
  }
}
