#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mmr;
using namespace mmr_test;

namespace {

const std::vector<std::string> kGapFour{"year", "country", "life_expect", "fertility"};

// Fixtures whose default spec has both visual and audio units.
std::vector<FixtureSpec> linked_fixtures() {
  std::vector<FixtureSpec> out;
  for (const auto& f : fixture_specs()) {
    if (f.name != "gapminder-all") out.push_back(f);
  }
  return out;
}

const TextNode* find_by_predicate(const TextNode& root, const Predicate& p) {
  const TextNode* hit = nullptr;
  for_each_node(root, [&](const TextNode& n, const TextNode*) {
    if (!hit && n.predicate == p) hit = &n;
  });
  return hit;
}

}  // namespace

TEST(Evaluate, Examples) {
  const auto& d = fixture("stocks.csv");
  const auto sym = d.require_column("symbol");
  for (const auto& row : d.rows()) {
    const bool is_aapl = row[sym] == Value{std::string("AAPL")};
    EXPECT_EQ(evaluate(equal("symbol", std::string("AAPL")), row, d.columns()), is_aapl);
    EXPECT_TRUE(evaluate(always(), row, d.columns()));
  }
}

TEST(Evaluate, YearRangeAndCountryMatchesNestedFilter) {
  const auto& d = fixture("gapminder.json");
  const Predicate p = conjoin(in_range("year", 1990.0, 1996.0), equal("country", std::string("South Africa")));
  std::vector<std::size_t> expect;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    const auto& raw = d.raw_rows()[r];
    if (raw[d.require_column("country")] != Value{std::string("South Africa")}) continue;
    const double y = std::get<double>(raw[d.require_column("year")]);
    if (y >= 1990 && y < 1996) expect.push_back(r);
  }
  EXPECT_EQ(expect.size(), 2u);
  EXPECT_EQ(matching_rows(p, d), expect);
}

TEST(Evaluate, TemporalOperandsCompareAsInstants) {
  const auto& d = fixture("stocks.csv");
  const Predicate iso = in_range("date", std::string("2005-01-01"), std::string("2006-01-01"));
  const Predicate ms = in_range("date", epoch_ms(2005, 1, 1), epoch_ms(2006, 1, 1));
  EXPECT_EQ(matching_rows(iso, d), matching_rows(ms, d));
  EXPECT_EQ(count_matching(iso, d), 5u * 12 - 0);
}

TEST(Evaluate, Errors) {
  const auto& d = fixture("stocks.csv");
  try {
    check_predicate(equal("nope", 1.0), d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown-field");
  }
  // Range order is checked once operands are read in the column's type.
  EXPECT_THROW(check_predicate(in_range("price", 5.0, 5.0), d), Error);
  EXPECT_THROW(check_predicate(predicate_from_json(Json::parse(R"({"field":"date","range":["2009-01-01","2001-01-01"]})")), d),
               Error);
}

TEST(Properties, ConjunctionIsMonotone) {
  std::mt19937 rng(8);
  for (const auto& f : fixture_specs()) {
    const auto& d = fixture(f.file);
    for (int i = 0; i < 30; ++i) {
      const auto p = random_predicate(rng, d, field_names(spec_for(f))), q = random_predicate(rng, d, field_names(spec_for(f)));
      const auto both = to_set(matching_rows(conjoin(p, q), d));
      const auto left = to_set(matching_rows(p, d));
      EXPECT_TRUE(std::includes(left.begin(), left.end(), both.begin(), both.end()));
    }
  }
}

TEST(Properties, JsonRoundTrip) {
  std::mt19937 rng(12);
  for (const auto& f : fixture_specs()) {
    const auto& d = fixture(f.file);
    for (int i = 0; i < 40; ++i) {
      const auto p = random_predicate(rng, d, field_names(spec_for(f)));
      const auto back = predicate_from_json(Json::parse(to_json(p).dump()));
      EXPECT_EQ(back, p) << to_json(p).dump();
      EXPECT_EQ(matching_rows(back, d), matching_rows(p, d));
    }
  }
  const SyncMessage m{ViewKind::audio, equal("symbol", std::string("GOOG")), 7};
  const auto back = sync_message_from_json(Json::parse(to_json(m).dump()));
  EXPECT_EQ(back.source, ViewKind::audio);
  EXPECT_EQ(back.predicate, m.predicate);
  EXPECT_EQ(back.version, 7u);
}

TEST(WireFormat, FigureShape) {
  EXPECT_EQ(plain(to_json(equal("symbol", std::string("AAPL")))),
            nlohmann::json::parse(R"({"field":"symbol","equal":"AAPL"})"));
  EXPECT_EQ(plain(to_json(conjoin(in_range("x", 1.0, 2.0), in_range("y", 3.0, 4.0)))),
            nlohmann::json::parse(R"({"and":[{"field":"x","range":[1,2]},{"field":"y","range":[3,4]}]})"));
  EXPECT_EQ(plain(to_json(always())), nlohmann::json(true));
  EXPECT_THROW(sync_message_from_json(Json::parse(R"({"source":"smell","predicate":true})")), Error);
}

TEST(FromTextNode, RootCountryAndInterval) {
  const auto& d = fixture("gapminder.json");
  const auto tree = build_tree(default_spec(d, kGapFour), d);
  EXPECT_TRUE(from_text_node(tree.root).is_true());
  const Predicate sa = equal("country", std::string("South Africa"));
  const auto* node = find_by_predicate(tree.root, sa);
  ASSERT_NE(node, nullptr);
  EXPECT_EQ(from_text_node(*node), sa);
  const TextNode* interval = nullptr;
  for_each_node(*node, [&](const TextNode& n, const TextNode*) {
    if (!interval && n.role == NodeRole::interval) interval = &n;
  });
  ASSERT_NE(interval, nullptr);
  const auto* a = std::get_if<AndPredicate>(&interval->predicate.node);
  ASSERT_NE(a, nullptr);
  ASSERT_EQ(a->terms.size(), 2u);
  EXPECT_EQ(a->terms[0], sa);
  EXPECT_TRUE(std::holds_alternative<FieldRange>(a->terms[1].node));
  const auto parent = to_set(matching_rows(sa, d)), child = to_set(matching_rows(interval->predicate, d));
  EXPECT_FALSE(child.empty());
  EXPECT_TRUE(std::includes(parent.begin(), parent.end(), child.begin(), child.end()));
}

TEST(FromAudioPosition, Examples) {
  EXPECT_TRUE(from_audio_position({}).is_true());
  EXPECT_TRUE(from_audio_position({{"country", std::nullopt, std::nullopt, false}}).is_true());
  EXPECT_EQ(from_audio_position({{"country", Value{std::string("South Africa")}, std::nullopt, false},
                                 {"year", std::nullopt, std::nullopt, false}}),
            equal("country", std::string("South Africa")));

  // A binned step's position is the bin the binning routine produced.
  const auto& d = fixture("penguins.json");
  const Spec s = default_spec(d, {"Flipper Length (mm)", "Body Mass (g)", "Species"});
  const auto& u = s.audio_units[0];
  ASSERT_TRUE(u.traversal[0].bin);
  const auto lin = linearize(u.traversal, d);
  const auto col = d.require_column(u.traversal[0].field);
  for (std::size_t t = 0; t < lin.tuples.size(); ++t) {
    const auto& bin = lin.domains[0].bins[lin.tuples[t].index[0]];
    const Predicate p = lin.constraint(t);
    const auto* r = std::get_if<FieldRange>(&p.node);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(*r, (FieldRange{u.traversal[0].field, Value{bin.lo}, Value{bin.hi}, bin.closed}));
    std::vector<std::size_t> expect;
    for (std::size_t row = 0; row < d.row_count(); ++row) {
      const auto* v = std::get_if<double>(&d.rows()[row][col]);
      if (v && *v >= bin.lo && (*v < bin.hi || (bin.closed && *v == bin.hi))) expect.push_back(row);
    }
    EXPECT_EQ(matching_rows(p, d), expect);
  }
}

TEST(Reify, AaplTextNodeHighlightsAndFilters) {
  const auto& d = fixture("stocks.csv");
  const auto ctx = ViewerContext::make(default_spec(d), d);
  const Predicate aapl = equal("symbol", std::string("AAPL"));
  const auto* node = find_by_predicate(ctx.tree.root, aapl);
  ASSERT_NE(node, nullptr);
  const auto effects = reify_all(ctx, {ViewKind::text, from_text_node(*node), std::nullopt});
  EXPECT_TRUE(std::holds_alternative<NoEffect>(effects.at(ViewKind::text)));
  const auto expect = to_set(matching_rows(aapl, d));
  EXPECT_EQ(emphasized_rows(std::get<HighlightEffect>(effects.at(ViewKind::visual)).doc), expect);
  const auto& audio = std::get<AudioFilterEffect>(effects.at(ViewKind::audio));
  EXPECT_EQ(audio.filter, aapl);
  EXPECT_EQ(audio_rows(audio.schedules, d), expect);
  EXPECT_EQ(audio.schedules[0].tone_count(), expect.size());
}

TEST(Reify, TrueIsIdentity) {
  const auto& d = fixture("stocks.csv");
  const auto ctx = ViewerContext::make(default_spec(d), d);
  const auto effects = reify_all(ctx, {ViewKind::visual, always(), std::nullopt});
  EXPECT_TRUE(std::holds_alternative<NoEffect>(effects.at(ViewKind::visual)));
  EXPECT_EQ(std::get<TextRescopeEffect>(effects.at(ViewKind::text)).tree.root, ctx.tree.root);
  EXPECT_EQ(std::get<AudioFilterEffect>(effects.at(ViewKind::audio)).schedules, schedule_all(ctx.spec, d));
  const auto lit = reify(ctx, {ViewKind::text, always(), std::nullopt}, ViewKind::visual);
  EXPECT_EQ(emphasized_rows(std::get<HighlightEffect>(lit).doc).size(), d.row_count());
}

TEST(Reify, GoogAudioPositionRescopesText) {
  const auto& d = fixture("stocks.csv");
  const auto ctx = ViewerContext::make(default_spec(d), d);
  const Predicate pos = from_audio_position({{"symbol", Value{std::string("GOOG")}, std::nullopt, false},
                                             {"date", Value{std::string("2007-03-01")}, std::nullopt, false}});
  const auto effect = reify(ctx, {ViewKind::audio, pos, std::nullopt}, ViewKind::text);
  const auto& tree = std::get<TextRescopeEffect>(effect).tree;
  std::size_t oracle = 0;
  for (const auto& row : d.rows()) oracle += evaluate(pos, row, d.columns()) ? 1 : 0;
  EXPECT_EQ(oracle, 1u);
  EXPECT_EQ(tree.root.count, oracle);
  EXPECT_EQ(text_rows(tree, d).size(), oracle);
}

TEST(Reify, Idempotent) {
  std::mt19937 rng(2);
  for (const auto& f : linked_fixtures()) {
    const auto& d = fixture(f.file);
    const auto ctx = ViewerContext::make(spec_for(f), d);
    const SyncMessage m{ViewKind::text, random_predicate(rng, d, field_names(spec_for(f))), std::nullopt};
    const auto a = reify_all(ctx, m), b = reify_all(ctx, m);
    EXPECT_TRUE(a == b) << f.name;
  }
}

TEST(Reify, RejectsUnknownField) {
  const auto& d = fixture("stocks.csv");
  const auto ctx = ViewerContext::make(default_spec(d), d);
  EXPECT_THROW(reify(ctx, {ViewKind::text, equal("nope", 1.0), std::nullopt}, ViewKind::audio), Error);
}

TEST(Properties, CrossModalRowSetsAgree) {
  std::mt19937 rng(2024);
  const auto fixtures = linked_fixtures();
  std::vector<ViewerContext> contexts;
  for (const auto& f : fixtures) {
    contexts.push_back(ViewerContext::make(spec_for(f), fixture(f.file)));
    ASSERT_TRUE(contexts.back().visual) << f.name;
    ASSERT_FALSE(contexts.back().spec.audio_units.empty()) << f.name;
  }
  int mismatches = 0, nonempty = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t k = static_cast<std::size_t>(i) % fixtures.size();
    const auto& ctx = contexts[k];
    const Predicate p = random_predicate(rng, ctx.data, field_names(ctx.spec));
    const auto effects = reify_all(ctx, {ViewKind::text, p, std::nullopt});
    const auto truth = to_set(matching_rows(p, ctx.data));
    const auto vis = emphasized_rows(std::get<HighlightEffect>(reify(ctx, {ViewKind::audio, p, std::nullopt}, ViewKind::visual)).doc);
    const auto aud = audio_rows(std::get<AudioFilterEffect>(effects.at(ViewKind::audio)).schedules, ctx.data);
    const auto txt = text_rows(std::get<TextRescopeEffect>(reify(ctx, {ViewKind::visual, p, std::nullopt}, ViewKind::text)).tree, ctx.data);
    if (!(vis == truth && aud == truth && txt == truth)) {
      ++mismatches;
      ADD_FAILURE() << fixtures[k].name << " " << to_json(p).dump() << " truth=" << truth.size() << " visual=" << vis.size()
                    << " audio=" << aud.size() << " text=" << txt.size();
    }
    nonempty += !truth.empty();
  }
  EXPECT_EQ(mismatches, 0);
  EXPECT_GT(nonempty, 50);
}

TEST(Reify, UnplaceableRowsLeaveEveryView) {
  const auto& d = fixture("penguins.json");
  const Spec s = spec_for(fixture_specs()[4]);
  const auto mass = d.require_column("Body Mass (g)"), flipper = d.require_column("Flipper Length (mm)");
  std::size_t placeable = 0;
  for (const auto& row : d.rows()) placeable += !is_null(row[mass]) && !is_null(row[flipper]);
  ASSERT_LT(placeable, d.row_count());
  const auto ctx = ViewerContext::make(s, d);
  EXPECT_EQ(ctx.data.row_count(), placeable);
  EXPECT_EQ(ctx.tree.root.count, placeable);
  EXPECT_EQ(plain(*ctx.visual)["data"]["values"].size(), placeable);
  EXPECT_EQ(audio_rows(schedule_all(s, ctx.data), ctx.data).size(), placeable);
  // Nulls in fields off the position and pitch channels are kept.
  const auto sex = d.require_column("Sex");
  std::size_t kept = 0;
  for (const auto& row : ctx.data.rows()) kept += is_null(row[sex]);
  EXPECT_GT(kept, 0u);
}
