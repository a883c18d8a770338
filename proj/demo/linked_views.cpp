// Walks through linked views on the gapminder data: defaults, a text
// selection reified in the other views, and an alternate playback order.

#include <iostream>

#include "mmr/mmr.hpp"

using namespace mmr;

int main(int argc, char** argv) {
  const std::string data_dir = argc > 1 ? argv[1] : MMR_DATA_DIR;
  const Dataset data = load_typed_file(data_dir + "/gapminder.json");

  // Start from all fields, as the editor does, then drop two of them.
  EditorState state = apply_edit({}, load_action("gapminder", DataFormat::json_records, read_file(data_dir + "/gapminder.json")));
  std::cout << "all fields: key = " << Json(state.spec.key).dump() << ", " << state.spec.visual_units.size()
            << " visual units\n";
  state = apply_edit(state, ToggleField{"cluster"});
  state = apply_edit(state, ToggleField{"pop"});
  std::cout << "four fields: " << state.spec.visual_units.size() << " visual unit, " << state.spec.audio_units.size()
            << " audio units\n\n";

  const auto ctx = ViewerContext::make(state.spec, data);
  const TextNode& south_africa = [&]() -> const TextNode& {
    for (const auto& n : ctx.tree.root.children) {
      if (n.predicate == equal("country", std::string("South Africa"))) return n;
    }
    return ctx.tree.root;
  }();
  std::cout << "text: " << south_africa.description << "\n";

  const SyncMessage message{ViewKind::text, from_text_node(south_africa), std::nullopt};
  const auto effects = reify_all(ctx, message);
  const auto& highlight = std::get<HighlightEffect>(effects.at(ViewKind::visual));
  std::cout << "visual test: " << highlight.doc["spec"]["encoding"]["opacity"]["condition"]["test"].dump() << "\n";
  const auto& filtered = std::get<AudioFilterEffect>(effects.at(ViewKind::audio));
  for (const auto& s : filtered.schedules) {
    std::cout << "audio " << s.unit_id << ": " << s.tone_count() << " tones, " << s.total_duration << " s\n";
  }

  const auto& unit = state.spec.audio_units.front();
  const std::vector<StepPosition> paused{{"year", Value{1990.0}, std::nullopt, false}};
  for (const auto& order : enumerate_playback_orders(unit, data, paused)) {
    const auto s = schedule_order(unit, state.spec, data, order);
    std::cout << "order \"" << order.descriptor << "\": " << s.tone_count() << " tones\n";
  }
  return 0;
}
