#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace mmr;
using namespace mmr_test;

namespace {

const std::vector<std::string> kPenguinFields{"Flipper Length (mm)", "Body Mass (g)", "Species"};

Spec penguin_spec() { return default_spec(fixture("penguins.json"), kPenguinFields); }

// The three-field penguins spec written out as a document.
const char* kPenguinDoc = R"doc({
  "key": [],
  "fields": [
    {"name": "Species", "type": "nominal",
     "encodings": [{"modality": "visual", "unit": "visual_0", "channel": "color"}]},
    {"name": "Flipper Length (mm)", "type": "quantitative",
     "encodings": [{"modality": "visual", "unit": "visual_0", "channel": "x"},
                   {"modality": "audio", "unit": "audio_0", "channel": "pitch"}]},
    {"name": "Body Mass (g)", "type": "quantitative",
     "encodings": [{"modality": "visual", "unit": "visual_0", "channel": "y"},
                   {"modality": "audio", "unit": "audio_1", "channel": "pitch"}]}
  ],
  "visual": {
    "units": [{"unit": "visual_0", "mark": "point",
               "encoding": {"x": {"field": "Flipper Length (mm)"}, "y": {"field": "Body Mass (g)"},
                            "color": {"field": "Species"}}}],
    "composition": "layer"
  },
  "audio": {
    "units": [
      {"unit": "audio_0", "encoding": {"pitch": {"field": "Flipper Length (mm)", "aggregate": "mean"}},
       "traversal": [{"field": "Body Mass (g)", "bin": true}]},
      {"unit": "audio_1", "encoding": {"pitch": {"field": "Body Mass (g)", "aggregate": "mean"}},
       "traversal": [{"field": "Flipper Length (mm)", "bin": true}]}
    ],
    "composition": "concat"
  }
})doc";

std::vector<std::string> codes(const ValidationReport& r) {
  std::vector<std::string> out;
  for (const auto& v : r) out.push_back(v.code);
  return out;
}

// Random specs: fields with random types, units with distinct channels, then
// back-references rebuilt. Specs that fail validation are discarded.
Spec random_spec(std::mt19937& rng) {
  std::uniform_int_distribution<int> n_fields(1, 6), n_units(0, 3), coin(0, 1), pct(0, 99);
  Spec s;
  const int nf = n_fields(rng);
  for (int i = 0; i < nf; ++i) {
    FieldDef f;
    f.name = "f" + std::to_string(i);
    f.type = static_cast<MeasureType>(std::uniform_int_distribution<int>(0, 3)(rng));
    if (is_continuous(f.type) && pct(rng) < 30) f.transform.bin = true;
    if (f.type == MeasureType::quantitative && pct(rng) < 30) {
      f.transform.aggregate = kAggregates[std::uniform_int_distribution<int>(0, 4)(rng)];
    }
    if (f.transform.bin && coin(rng)) f.transform.bin_count = std::uniform_int_distribution<int>(2, 20)(rng);
    s.fields.push_back(f);
  }
  std::uniform_int_distribution<int> pick_field(0, nf - 1);
  const int nv = n_units(rng);
  for (int u = 0; u < nv; ++u) {
    VisualUnit vu{"v" + std::to_string(u), kMarks[std::uniform_int_distribution<int>(0, 3)(rng)], {}};
    for (auto c : kVisualChannels) {
      if (c == Channel::facet) continue;
      if (pct(rng) < 50) {
        UnitEncoding e{c, s.fields[static_cast<std::size_t>(pick_field(rng))].name, std::nullopt};
        if (pct(rng) < 20) e.override_transform = Transform{Aggregate::count, false, std::nullopt};
        vu.encoding.push_back(e);
      }
    }
    s.visual_units.push_back(vu);
  }
  const int na = n_units(rng);
  std::vector<TraversalStep> shared;
  for (int u = 0; u < na; ++u) {
    AudioUnit au{"a" + std::to_string(u), {}, {}};
    au.encoding.push_back({Channel::pitch, s.fields[static_cast<std::size_t>(pick_field(rng))].name, std::nullopt});
    if (coin(rng)) au.encoding.push_back({Channel::volume, s.fields[static_cast<std::size_t>(pick_field(rng))].name, std::nullopt});
    std::set<int> used;
    const int steps = std::uniform_int_distribution<int>(1, std::min(3, nf))(rng);
    while (static_cast<int>(au.traversal.size()) < steps) {
      const int f = pick_field(rng);
      if (!used.insert(f).second) continue;
      const auto& fd = s.fields[static_cast<std::size_t>(f)];
      au.traversal.push_back({fd.name, is_continuous(fd.type) && coin(rng), std::nullopt});
    }
    s.audio_units.push_back(au);
  }
  s.composition.visual.op = coin(rng) ? CompositionOp::layer : CompositionOp::concat;
  s.composition.audio.op = coin(rng) ? CompositionOp::layer : CompositionOp::concat;
  if (s.composition.audio.op == CompositionOp::layer) {
    for (auto& u : s.audio_units) u.traversal = s.audio_units.front().traversal;
  }
  for (const auto& f : s.fields) {
    if (!is_continuous(f.type) && pct(rng) < 40) s.key.push_back(f.name);
  }
  sync_composition(s);
  rebuild_refs(s);
  std::shuffle(s.composition.visual.units.begin(), s.composition.visual.units.end(), rng);
  return s;
}

}  // namespace

TEST(Validate, PenguinSpecIsValid) {
  const Spec s = penguin_spec();
  EXPECT_TRUE(validate(s).empty());
  EXPECT_EQ(s.fields.size(), 3u);
  EXPECT_EQ(s.visual_units.size(), 1u);
  EXPECT_EQ(s.audio_units.size(), 2u);
}

TEST(Validate, PenguinDocumentParsesToSameSpec) {
  const Spec doc = spec_from_json(Json::parse(kPenguinDoc));
  EXPECT_TRUE(validate(doc).empty());
  EXPECT_EQ(doc, penguin_spec());
}

TEST(Validate, DuplicateChannel) {
  Spec s = penguin_spec();
  s.visual_units[0].encoding.push_back({Channel::y, "Flipper Length (mm)", std::nullopt});
  rebuild_refs(s);
  const auto r = validate(s);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].code, "duplicate-channel");
  EXPECT_NE(r[0].message.find("'y'"), std::string::npos);
}

TEST(Validate, EmptySpecIsValid) { EXPECT_TRUE(validate(Spec{}).empty()); }

TEST(Validate, DanglingAndMissingReferences) {
  Spec s = penguin_spec();
  s.field("Species")->encodings.push_back({Modality::visual, "nope", Channel::size});
  EXPECT_EQ(codes(validate(s)), (std::vector<std::string>{"dangling-ref"}));

  Spec t = penguin_spec();
  t.field("Species")->encodings.clear();
  EXPECT_EQ(codes(validate(t)), (std::vector<std::string>{"missing-backref"}));
}

TEST(Validate, UnknownKeyAndTraversalFields) {
  Spec s = penguin_spec();
  s.key = {"Island"};
  s.audio_units[0].traversal[0].field = "Island";
  const auto c = codes(validate(s));
  EXPECT_NE(std::find(c.begin(), c.end(), "unknown-key-field"), c.end());
  EXPECT_NE(std::find(c.begin(), c.end(), "unknown-traversal-field"), c.end());
}

TEST(Validate, LayeredAudioMustShareTraversal) {
  Spec s = penguin_spec();
  s.composition.audio.op = CompositionOp::layer;
  EXPECT_EQ(codes(validate(s)), (std::vector<std::string>{"layered-traversal-mismatch"}));
  s.audio_units[1].traversal = s.audio_units[0].traversal;
  EXPECT_TRUE(validate(s).empty());
}

TEST(Validate, BinOnNominalAndWrongModality) {
  Spec s = penguin_spec();
  s.field("Species")->transform.bin = true;
  EXPECT_EQ(codes(validate(s)), (std::vector<std::string>{"bin-on-discrete"}));

  Spec t = penguin_spec();
  t.visual_units[0].encoding.push_back({Channel::pitch, "Species", std::nullopt});
  rebuild_refs(t);
  const auto c = codes(validate(t));
  ASSERT_FALSE(c.empty());
  for (const auto& code : c) EXPECT_EQ(code, "channel-modality-mismatch");
}

TEST(Validate, CompositionMustListEveryUnitOnce) {
  Spec s = penguin_spec();
  s.composition.audio.units = {"audio_0"};
  EXPECT_EQ(codes(validate(s)), (std::vector<std::string>{"composition-missing-unit"}));
  s.composition.audio.units = {"audio_0", "audio_1", "audio_0"};
  EXPECT_EQ(codes(validate(s)), (std::vector<std::string>{"composition-duplicate-unit"}));
}

TEST(Validate, RequireValidThrows) {
  Spec s = penguin_spec();
  s.key = {"missing"};
  try {
    require_valid(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "invalid-spec");
  }
}

TEST(EncodingView, PenguinAudioBlocks) {
  const auto view = to_encoding_view(penguin_spec());
  std::vector<const UnitView*> audio;
  for (const auto& u : view.units) {
    if (u.modality == Modality::audio) audio.push_back(&u);
  }
  ASSERT_EQ(audio.size(), 2u);
  for (const auto* u : audio) {
    ASSERT_EQ(u->encoding.size(), 1u);
    EXPECT_EQ(u->encoding[0].channel, Channel::pitch);
    ASSERT_EQ(u->traversal.size(), 1u);
    EXPECT_TRUE(u->traversal[0].bin);
  }
}

TEST(EncodingView, FieldViewNestsEncodingsUnderMeasures) {
  const Spec s = to_field_view(to_encoding_view(penguin_spec()));
  const auto refs = [&](const char* name) {
    std::vector<std::pair<Modality, Channel>> out;
    for (const auto& r : s.field(name)->encodings) out.emplace_back(r.modality, r.channel);
    return out;
  };
  using P = std::pair<Modality, Channel>;
  EXPECT_EQ(refs("Flipper Length (mm)"), (std::vector<P>{{Modality::visual, Channel::x}, {Modality::audio, Channel::pitch}}));
  EXPECT_EQ(refs("Body Mass (g)"), (std::vector<P>{{Modality::visual, Channel::y}, {Modality::audio, Channel::pitch}}));
  EXPECT_EQ(refs("Species"), (std::vector<P>{{Modality::visual, Channel::color}}));
}

TEST(EncodingView, EmptyRoundTrips) {
  const auto view = to_encoding_view(Spec{});
  EXPECT_TRUE(view.units.empty());
  EXPECT_EQ(to_field_view(EncodingOrientedView{}), Spec{});
}

TEST(EncodingView, InvalidSpecRejected) {
  Spec s = penguin_spec();
  s.key = {"missing"};
  EXPECT_THROW(to_encoding_view(s), Error);
}

TEST(EncodingView, TwoEncodingsOnOneChannelAreInconsistent) {
  auto view = to_encoding_view(penguin_spec());
  auto& u = view.units[0];
  u.encoding.push_back(u.encoding[0]);
  try {
    to_field_view(view);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "inconsistent-view");
  }
}

TEST(EncodingView, StocksViewByHand) {
  // The line-chart defaults for stocks, written as an encoding-oriented view.
  const FieldSummary date{"date", MeasureType::temporal, {}};
  const FieldSummary symbol{"symbol", MeasureType::nominal, {}};
  const FieldSummary price{"price", MeasureType::quantitative, {}};
  EncodingOrientedView view;
  view.fields = {symbol, date, price};
  view.units.push_back({Modality::visual,
                        "visual_0",
                        Mark::line,
                        {{Channel::x, date, std::nullopt}, {Channel::y, price, std::nullopt}, {Channel::color, symbol, std::nullopt}},
                        {}});
  view.units.push_back({Modality::audio,
                        "audio_0",
                        std::nullopt,
                        {{Channel::pitch, price, std::nullopt}},
                        {{"symbol", false, std::nullopt}, {"date", false, std::nullopt}}});
  view.composition.visual = {CompositionOp::layer, {"visual_0"}};
  view.composition.audio = {CompositionOp::concat, {"audio_0"}};
  view.key = {"symbol", "date"};

  const Spec generated = default_spec(fixture("stocks.csv"));
  EXPECT_EQ(to_encoding_view(generated), view);

  const Spec s = to_field_view(view);
  EXPECT_EQ(s, generated);
  int pitch = 0, y = 0;
  for (const auto& r : s.field("price")->encodings) {
    pitch += r.channel == Channel::pitch;
    y += r.channel == Channel::y;
  }
  EXPECT_EQ(pitch, 1);
  EXPECT_EQ(y, 1);
  EXPECT_EQ(s.field("price")->encodings.size(), 2u);
}

TEST(Properties, RandomSpecsRoundTrip) {
  std::mt19937 rng(77);
  int valid = 0;
  for (int i = 0; i < 2000; ++i) {
    const Spec s = random_spec(rng);
    if (!validate(s).empty()) continue;
    ++valid;
    ASSERT_EQ(to_field_view(to_encoding_view(s)), normalize(s)) << to_json(s).dump();
    ASSERT_EQ(spec_from_json(to_json(s)), normalize(s)) << to_json(s).dump();
  }
  EXPECT_GT(valid, 500);
}

TEST(Properties, ChannelUniquenessHoldsForValidSpecs) {
  std::mt19937 rng(78);
  for (int i = 0; i < 2000; ++i) {
    Spec s = random_spec(rng);
    if (!s.visual_units.empty() && !s.visual_units[0].encoding.empty()) {
      // Force a second field onto an existing channel: never valid.
      auto e = s.visual_units[0].encoding[0];
      e.field = s.fields.back().name == e.field ? s.fields.front().name : s.fields.back().name;
      if (e.field == s.visual_units[0].encoding[0].field) continue;
      s.visual_units[0].encoding.push_back(e);
      rebuild_refs(s);
      const auto c = codes(validate(s));
      EXPECT_NE(std::find(c.begin(), c.end(), "duplicate-channel"), c.end());
    }
  }
}

TEST(Properties, ReferenceClosureOfValidSpecs) {
  std::mt19937 rng(79);
  for (int i = 0; i < 1000; ++i) {
    const Spec s = random_spec(rng);
    if (!validate(s).empty()) continue;
    for (const auto& f : s.fields) {
      for (const auto& r : f.encodings) {
        const std::vector<UnitEncoding>& encs = r.modality == Modality::visual ? s.visual_unit(r.unit)->encoding
                                                                               : s.audio_unit(r.unit)->encoding;
        const auto* e = find_encoding(encs, r.channel);
        ASSERT_NE(e, nullptr);
        EXPECT_EQ(e->field, f.name);
      }
    }
    if (s.composition.audio.op == CompositionOp::layer) {
      for (const auto& u : s.audio_units) EXPECT_EQ(u.traversal, s.audio_units.front().traversal);
    }
  }
}

TEST(SpecJson, UnknownChannelIsMalformed) {
  Json j = Json::parse(kPenguinDoc);
  j["visual"]["units"][0]["encoding"]["shape"] = {{"field", "Species"}};
  EXPECT_THROW(spec_from_json(j), Error);
}
