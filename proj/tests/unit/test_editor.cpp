#include <gtest/gtest.h>

#include <chrono>

#include "oracles.hpp"

using namespace mmr;
using namespace mmr_test;

namespace {

EditorState loaded(const std::string& file) {
  const auto format = file.ends_with(".csv") ? DataFormat::csv : DataFormat::json_records;
  return apply_edit({}, load_action(file, format, read_file(data_path(file))));
}

// Small slices of the fixtures keep the fuzz fast.
std::vector<LoadDataset> catalog() {
  std::vector<LoadDataset> out;
  auto gap = nlohmann::json::parse(read_file(data_path("gapminder.json")));
  nlohmann::json three = nlohmann::json::array();
  for (const auto& r : gap) {
    const auto c = r["country"].get<std::string>();
    if (c == "South Africa" || c == "Chile" || c == "Japan") three.push_back(r);
  }
  out.push_back(load_action("gapminder-3", DataFormat::json_records, three.dump()));

  std::istringstream stocks(read_file(data_path("stocks.csv")));
  std::string line, head;
  for (int i = 0; i < 25 && std::getline(stocks, line); ++i) head += line + "\n";
  out.push_back(load_action("stocks-24", DataFormat::csv, head));

  auto peng = nlohmann::json::parse(read_file(data_path("penguins.json")));
  out.push_back(load_action("penguins-30", DataFormat::json_records,
                            nlohmann::json(std::vector<nlohmann::json>(peng.begin(), peng.begin() + 30)).dump()));
  out.push_back(load_action("empty", DataFormat::csv, ""));
  return out;
}

bool listed(const std::vector<EditAction>& actions, const EditAction& a) {
  return std::find(actions.begin(), actions.end(), a) != actions.end();
}

const UnitEncoding* visual_binding(const EditorState& s, Channel c) {
  return find_encoding(s.spec.visual_units.at(0).encoding, c);
}

}  // namespace

TEST(ApplyEdit, UncheckingRegeneratesDefaults) {
  EditorState s = loaded("gapminder.json");
  EXPECT_EQ(s.selected.size(), 6u);
  EXPECT_TRUE(s.spec.visual_units.empty());
  s = apply_edit(s, ToggleField{"cluster"});
  s = apply_edit(s, ToggleField{"pop"});
  EXPECT_EQ(s.selected, (std::vector<std::string>{"year", "country", "life_expect", "fertility"}));
  EXPECT_FALSE(s.dirty_defaults);
  EXPECT_EQ(s.spec, default_spec(*s.dataset, s.selected));
  ASSERT_EQ(s.spec.visual_units.size(), 1u);
  EXPECT_EQ(s.spec.visual_units[0].mark, Mark::line);
  EXPECT_EQ(visual_binding(s, Channel::facet)->field, "country");
  EXPECT_EQ(visual_binding(s, Channel::order)->field, "year");
  EXPECT_EQ(s.spec.audio_units.size(), 2u);
}

TEST(ApplyEdit, RefacetByYearLeavesSonificationAlone) {
  EditorState s = loaded("gapminder.json");
  s = apply_edit(s, ToggleField{"cluster"});
  s = apply_edit(s, ToggleField{"pop"});
  const auto audio_before = s.spec.audio_units;
  const std::string unit = s.spec.visual_units[0].id;
  s = apply_edit(s, RemoveEncoding{{Modality::visual, unit, Channel::facet}});
  s = apply_edit(s, MoveEncoding{{Modality::visual, unit, Channel::order}, {Modality::visual, unit, Channel::facet}});
  EXPECT_EQ(visual_binding(s, Channel::facet)->field, "year");
  EXPECT_EQ(visual_binding(s, Channel::order), nullptr);
  EXPECT_EQ(s.spec.audio_units, audio_before);
  EXPECT_TRUE(s.dirty_defaults);
  EXPECT_TRUE(validate(s.spec).empty());
}

TEST(ApplyEdit, SwitchTabKeepsSpec) {
  const EditorState s = apply_edit(loaded("stocks.csv"), SwitchTab{Tab::fields});
  const EditorState t = apply_edit(s, SwitchTab{Tab::visual});
  EXPECT_EQ(t.tab, Tab::visual);
  EXPECT_EQ(t.spec, s.spec);
  EXPECT_EQ(t.dirty_defaults, s.dirty_defaults);
}

TEST(ApplyEdit, ManualEditsSurviveToggles) {
  EditorState s = loaded("stocks.csv");
  const std::string unit = s.spec.visual_units[0].id;
  s = apply_edit(s, SetMark{unit, Mark::point});
  s = apply_edit(s, ToggleField{"price"});
  EXPECT_EQ(s.spec.field("price"), nullptr);
  EXPECT_EQ(s.spec.visual_units[0].mark, Mark::point);
  s = apply_edit(s, ToggleField{"price"});
  ASSERT_NE(s.spec.field("price"), nullptr);
  EXPECT_TRUE(s.spec.field("price")->encodings.empty());
  EXPECT_EQ(s.spec.visual_units[0].mark, Mark::point);
}

TEST(ApplyEdit, RemoveUnitCascadesOnlyItsReferences) {
  EditorState s = loaded("penguins.json");
  s = apply_edit(s, ToggleField{"Island"});
  s = apply_edit(s, ToggleField{"Beak Length (mm)"});
  s = apply_edit(s, ToggleField{"Beak Depth (mm)"});
  s = apply_edit(s, ToggleField{"Sex"});
  ASSERT_EQ(s.spec.audio_units.size(), 2u);
  const auto keep = s.spec.audio_units[1];
  const auto visual = s.spec.visual_units;
  const auto t = apply_edit(s, RemoveUnit{Modality::audio, s.spec.audio_units[0].id});
  ASSERT_EQ(t.spec.audio_units.size(), 1u);
  EXPECT_EQ(t.spec.audio_units[0], keep);
  EXPECT_EQ(t.spec.visual_units, visual);
  EXPECT_EQ(t.spec.composition.audio.units, std::vector<std::string>{keep.id});
  for (const auto& f : t.spec.fields) {
    for (const auto& r : f.encodings) EXPECT_NE(r.unit, s.spec.audio_units[0].id);
  }
}

TEST(ApplyEdit, InvalidActionsThrow) {
  const EditorState s = loaded("stocks.csv");
  const std::string unit = s.spec.visual_units[0].id;
  const EditAction bad[] = {
      AddEncoding{{Modality::visual, unit, Channel::y}, "symbol"},
      AddEncoding{{Modality::visual, "nope", Channel::size}, "price"},
      AddEncoding{{Modality::visual, unit, Channel::pitch}, "price"},
      RemoveEncoding{{Modality::visual, unit, Channel::size}},
      ToggleField{"volume"},
      SetMeasureType{"symbol", MeasureType::quantitative},
      SetTraversal{s.spec.audio_units[0].id, {}},
  };
  const auto actions = available_actions(s);
  for (const auto& a : bad) {
    EXPECT_FALSE(listed(actions, a)) << to_json(a).dump();
    try {
      apply_edit(s, a);
      ADD_FAILURE() << "accepted " << to_json(a).dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), "invalid-action");
    }
  }
  EXPECT_THROW(apply_edit({}, ToggleField{"price"}), Error);
}

TEST(AvailableActions, BoundChannelNotOffered) {
  const EditorState s = loaded("stocks.csv");
  const std::string unit = s.spec.visual_units[0].id;
  const auto actions = available_actions(s);
  for (const auto& f : s.spec.fields) {
    EXPECT_FALSE(listed(actions, AddEncoding{{Modality::visual, unit, Channel::y}, f.name}));
  }
  EXPECT_TRUE(listed(actions, AddEncoding{{Modality::visual, unit, Channel::size}, "price"}));
}

TEST(AvailableActions, EmptyDatasetOffersOnlyLoadAndTabs) {
  for (const auto& start : {EditorState{}, apply_edit({}, load_action("empty", DataFormat::csv, "a,b\n"))}) {
    const auto actions = available_actions(start);
    ASSERT_FALSE(actions.empty());
    for (const auto& a : actions) {
      EXPECT_TRUE(std::holds_alternative<LoadDataset>(a) || std::holds_alternative<SwitchTab>(a)) << to_json(a).dump();
    }
  }
}

TEST(AvailableActions, ExactlyTheValidCandidates) {
  // Listed actions succeed; every other candidate over the same state fails.
  const EditorState s = apply_edit(loaded("penguins.json"), ToggleField{"Island"});
  const auto actions = available_actions(s);
  std::vector<EditAction> probes;
  for (const auto& u : s.spec.visual_units) {
    for (auto c : kVisualChannels) {
      for (const auto& f : s.spec.fields) probes.push_back(AddEncoding{{Modality::visual, u.id, c}, f.name});
      probes.push_back(RemoveEncoding{{Modality::visual, u.id, c}});
    }
  }
  for (const auto& f : s.spec.fields) {
    for (auto t : {MeasureType::quantitative, MeasureType::nominal, MeasureType::ordinal, MeasureType::temporal}) {
      probes.push_back(SetMeasureType{f.name, t});
    }
  }
  for (const auto& a : probes) {
    bool ok = true;
    try {
      apply_edit(s, a);
    } catch (const Error&) {
      ok = false;
    }
    if (listed(actions, a)) { EXPECT_TRUE(ok) << to_json(a).dump(); }
    // A no-op type change is valid but not worth listing.
    if (ok && !listed(actions, a)) {
      const auto* t = std::get_if<SetMeasureType>(&a);
      EXPECT_TRUE(t && s.spec.field(t->field)->type == t->type) << to_json(a).dump();
    }
  }
}

TEST(Properties, ClosureFuzz) {
  const auto cat = catalog();
  std::mt19937 rng(1234);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t steps = 0;
  std::map<std::size_t, int> kinds;
  for (int seq = 0; seq < 1000; ++seq) {
    EditorState s;
    std::vector<EditAction> log;
    const int len = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int k = 0; k < len; ++k) {
      const auto actions = available_actions(s, cat);
      ASSERT_FALSE(actions.empty());
      // Pick a kind first so rare kinds are not drowned out by transforms;
      // loads are rare once data is in.
      std::map<std::size_t, std::vector<const EditAction*>> by_kind;
      for (const auto& a : actions) {
        if (!std::holds_alternative<LoadDataset>(a) || !s.has_rows() || rng() % 20 == 0) by_kind[a.index()].push_back(&a);
      }
      auto kind = by_kind.begin();
      std::advance(kind, std::uniform_int_distribution<std::size_t>(0, by_kind.size() - 1)(rng));
      const auto& pool = kind->second;
      const EditAction& a = *pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
      s = apply_edit(s, a);
      log.push_back(a);
      ++steps;
      ++kinds[a.index()];
      const auto report = check_state(s);
      ASSERT_TRUE(report.empty()) << "seq " << seq << " after " << to_json(a, false).dump() << ": "
                                  << to_json(report).dump();
      ASSERT_TRUE(validate(s.spec).empty());
    }
    ASSERT_EQ(replay(log), s) << "seq " << seq;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  RecordProperty("steps", static_cast<int>(steps));
  // Every action kind gets exercised.
  EXPECT_EQ(kinds.size(), std::variant_size_v<EditAction>);
  EXPECT_LT(secs, 120.0);
}

TEST(Properties, DefaultRegenerationIsPure) {
  std::mt19937 rng(55);
  const auto cat = catalog();
  for (int i = 0; i < 50; ++i) {
    const auto& load = cat[i % 3];
    std::vector<std::string> cols;
    for (const auto& c : load.dataset->columns()) cols.push_back(c.name);
    std::vector<std::string> drop;
    for (const auto& c : cols) {
      if (rng() % 2) drop.push_back(c);
    }
    if (drop.size() == cols.size()) drop.pop_back();
    EditorState a = apply_edit({}, load), b = apply_edit({}, load);
    for (const auto& f : drop) a = apply_edit(a, ToggleField{f});
    for (auto it = drop.rbegin(); it != drop.rend(); ++it) b = apply_edit(b, ToggleField{*it});
    EXPECT_EQ(a.spec, b.spec);
    EXPECT_EQ(a.spec, default_spec(*load.dataset, a.selected));
  }
}

TEST(ActionJson, RoundTrip) {
  std::mt19937 rng(77);
  const auto cat = catalog();
  EditorState s;
  for (int k = 0; k < 40; ++k) {
    const auto actions = available_actions(s, cat);
    for (const auto& a : actions) {
      const auto back = action_from_json(Json::parse(to_json(a).dump()));
      EXPECT_TRUE(back == a) << to_json(a, false).dump();
    }
    s = apply_edit(s, actions[std::uniform_int_distribution<std::size_t>(0, actions.size() - 1)(rng)]);
  }
  EXPECT_THROW(action_from_json(Json::parse(R"({"type":"teleport"})")), Error);
  EXPECT_THROW(action_from_json(Json::parse(R"({"type":"toggle_field"})")), Error);
}

TEST(StateJson, Shape) {
  const auto j = plain(to_json(loaded("stocks.csv")));
  EXPECT_EQ(j["dataset"]["row_count"], 560);
  EXPECT_EQ(j["selected"].size(), 3u);
  EXPECT_EQ(j["tab"], "data");
  EXPECT_FALSE(j["dirty_defaults"].get<bool>());
  EXPECT_EQ(j["spec"]["key"], nlohmann::json::parse(R"(["symbol","date"])"));
}
