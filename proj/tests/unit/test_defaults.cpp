#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mmr;
using namespace mmr_test;

namespace {

KeyFieldInfo key_of(MeasureType t, std::size_t categories = 3) { return {t, categories}; }
constexpr auto T = MeasureType::temporal;
constexpr auto N = MeasureType::nominal;
constexpr auto Q = MeasureType::quantitative;

struct Generated {
  GoldenRow golden;
  Spec spec;
};

Generated generate_row(int row) {
  Generated g{load_golden(row), {}};
  std::vector<std::string> all;
  for (const auto& c : g.golden.data.columns()) all.push_back(c.name);
  g.spec = default_spec(g.golden.data, all);
  return g;
}

void expect_no_key_sonified(const Spec& s) {
  for (const auto& u : s.audio_units) {
    for (const auto& e : u.encoding) {
      EXPECT_EQ(std::find(s.key.begin(), s.key.end(), e.field), s.key.end()) << e.field;
    }
  }
}

}  // namespace

TEST(MatchRule, Examples) {
  EXPECT_EQ(match_rule({key_of(T), key_of(N, 5)}, {Q}), 1);
  EXPECT_EQ(match_rule({key_of(T), key_of(N, 6)}, {Q}), 2);
  EXPECT_EQ(match_rule({}, {N}), std::nullopt);
  EXPECT_EQ(match_rule({}, {Q, Q, N}), 3);
  EXPECT_EQ(match_rule({}, {N, Q, Q}), 3);
  EXPECT_EQ(match_rule({key_of(T)}, {Q, Q}), 4);
  EXPECT_EQ(match_rule({key_of(T), key_of(N), key_of(N)}, {Q}), 5);
  EXPECT_EQ(match_rule({key_of(T), key_of(N)}, {Q, Q}), 6);
  EXPECT_EQ(match_rule({key_of(T), key_of(N)}, {Q, Q, Q}), std::nullopt);
}

TEST(MatchRule, OrdinalCountsAsNominal) {
  EXPECT_EQ(match_rule({key_of(T), key_of(MeasureType::ordinal, 4)}, {Q}), 1);
}

class RuleGolden : public ::testing::TestWithParam<int> {};

TEST_P(RuleGolden, FragmentsMatch) {
  const auto g = generate_row(GetParam());
  const auto& doc = g.golden.doc;
  const auto& names = g.golden.names;
  ASSERT_TRUE(validate(g.spec).empty());

  std::vector<std::string> expected_key;
  for (const auto& k : doc["key"]) expected_key.push_back(names.at(k.get<std::string>()));
  EXPECT_EQ(g.spec.key, expected_key);

  EXPECT_EQ(visual_fragment(g.spec), substitute(doc["visual"], names));
  EXPECT_EQ(audio_fragment(g.spec), substitute(golden_audio(doc), names));
  EXPECT_EQ(plain(grouping_fragment(grouping_plan(g.spec))), substitute(doc["text"], names));
}

INSTANTIATE_TEST_SUITE_P(Rows, RuleGolden, ::testing::Values(1, 2, 3, 4, 5, 6));

TEST(RuleGolden, RowSixSourceFragmentRepeatsValue) {
  // The unpatched golden fragment would bind x and y to the same value.
  const auto doc = nlohmann::json::parse(read_file(golden_path("rules/row6.json")));
  EXPECT_EQ(doc["visual"]["encoding"]["x"], doc["visual"]["encoding"]["y"]);
  const auto g = generate_row(6);
  EXPECT_NE(g.spec.visual_units[0].encoding[0].field, g.spec.visual_units[0].encoding[1].field);
}

TEST(Defaults, StocksLineChart) {
  const Spec s = default_spec(fixture("stocks.csv"));
  ASSERT_EQ(s.visual_units.size(), 1u);
  const auto& v = s.visual_units[0];
  EXPECT_EQ(v.mark, Mark::line);
  EXPECT_EQ(find_encoding(v.encoding, Channel::x)->field, "date");
  EXPECT_EQ(find_encoding(v.encoding, Channel::y)->field, "price");
  EXPECT_EQ(find_encoding(v.encoding, Channel::color)->field, "symbol");
  ASSERT_EQ(s.audio_units.size(), 1u);
  EXPECT_EQ(find_encoding(s.audio_units[0].encoding, Channel::pitch)->field, "price");
  EXPECT_EQ(s.audio_units[0].traversal,
            (std::vector<TraversalStep>{{"symbol", false, std::nullopt}, {"date", false, std::nullopt}}));
  EXPECT_EQ(plain(grouping_fragment(grouping_plan(s))),
            nlohmann::json::parse(R"({"groupby":"symbol","children":[{"groupby":"date"},{"groupby":"price"}]})"));
}

TEST(Defaults, PenguinsScatterWithTwoSonifications) {
  const Spec s = default_spec(fixture("penguins.json"), {"Flipper Length (mm)", "Body Mass (g)", "Species"});
  ASSERT_EQ(s.visual_units.size(), 1u);
  EXPECT_EQ(s.visual_units[0].mark, Mark::point);
  EXPECT_EQ(find_encoding(s.visual_units[0].encoding, Channel::color)->field, "Species");
  ASSERT_EQ(s.audio_units.size(), 2u);
  EXPECT_EQ(s.composition.audio.op, CompositionOp::concat);
  for (const auto& u : s.audio_units) {
    const auto* p = find_encoding(u.encoding, Channel::pitch);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(effective_transform(s, *p).aggregate, Aggregate::mean);
    ASSERT_EQ(u.traversal.size(), 1u);
    EXPECT_TRUE(u.traversal[0].bin);
    EXPECT_NE(u.traversal[0].field, p->field);
  }
}

TEST(Defaults, GapminderAllFieldsHasNoUnits) {
  const auto& g = fixture("gapminder.json");
  const Spec s = default_spec(g);
  EXPECT_TRUE(s.visual_units.empty());
  EXPECT_TRUE(s.audio_units.empty());
  EXPECT_EQ(s.fields.size(), 6u);
  const auto plan = grouping_plan(s);
  EXPECT_FALSE(plan.outer);
  ASSERT_EQ(plan.branches.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(plan.branches[i].field, g.columns()[i].name);
}

TEST(Defaults, GapminderFourFieldsFacetedConnectedScatter) {
  const Spec s = default_spec(fixture("gapminder.json"), {"year", "country", "life_expect", "fertility"});
  ASSERT_EQ(s.visual_units.size(), 1u);
  const auto& v = s.visual_units[0];
  EXPECT_EQ(v.mark, Mark::line);
  EXPECT_EQ(find_encoding(v.encoding, Channel::facet)->field, "country");
  EXPECT_EQ(find_encoding(v.encoding, Channel::order)->field, "year");
  EXPECT_EQ(s.audio_units.size(), 2u);
}

TEST(Defaults, UnusedQuantitativeFieldsDropped) {
  // stocks has one value field; a fourth numeric column is not consumed.
  const auto d = load_typed("symbol,date,price,volume\nA,2001-01-01,1,5\nA,2001-02-01,2,6\nB,2001-01-01,3,7\n"
                            "B,2001-02-01,4,8\n",
                            DataFormat::csv);
  const Spec s = default_spec(d, {"symbol", "date", "price"});
  EXPECT_EQ(s.field("volume"), nullptr);
}

TEST(Properties, GeneratedDefaultsValidStableAndNeverSonifyKeys) {
  std::mt19937 rng(4242);
  int with_units = 0;
  for (int i = 0; i < 400; ++i) {
    auto g = random_table(rng, 60, std::uniform_int_distribution<std::size_t>(1, 5)(rng));
    const Spec a = default_spec(g.data, g.names);
    const Spec b = default_spec(g.data, g.names);
    ASSERT_TRUE(validate(a).empty()) << to_json(validate(a)).dump();
    ASSERT_EQ(a, b);
    if (!a.audio_units.empty()) ++with_units;
    expect_no_key_sonified(a);
  }
  EXPECT_GT(with_units, 3);
  for (int row = 1; row <= 6; ++row) {
    const auto g = generate_row(row);
    EXPECT_EQ(g.spec, generate_row(row).spec);
    expect_no_key_sonified(g.spec);
  }
  for (const auto& f : fixture_specs()) {
    const Spec s = spec_for(f);
    EXPECT_TRUE(validate(s).empty()) << f.name;
    EXPECT_EQ(s, spec_for(f));
    expect_no_key_sonified(s);
  }
}
