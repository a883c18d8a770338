#pragma once

// One compilation pass over a spec and dataset, shared by the CLI and the
// HTTP service so both emit identical bytes.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmr/audio.hpp"
#include "mmr/reify.hpp"
#include "mmr/text.hpp"
#include "mmr/visual.hpp"

namespace mmr {

// The dataset re-typed to the spec's field types.
inline Dataset typed_for(const Spec& spec, const Dataset& data) {
  std::map<std::string, MeasureType> types;
  for (const auto& f : spec.fields) {
    if (data.column_index(f.name)) types[f.name] = f.type;
  }
  return data.with_types(types);
}

struct ArtifactOptions {
  ScheduleOptions audio;
  std::optional<std::string> order;  // playback order descriptor, first audio unit
  bool wav = false;
  int sample_rate = wav::kDefaultSampleRate;
};

struct Artifacts {
  std::optional<Json> visual;
  TextTree tree;
  std::vector<AudioSchedule> schedules;
  Composition audio_composition;
  std::vector<WavFile> wav;

  Json text_json() const { return to_json(tree); }
  std::string text_plain() const { return render_text(tree.root); }
  Json audio_json() const { return to_json(schedules, audio_composition); }

  // File name -> bytes, as the CLI writes them.
  std::map<std::string, std::string> files() const {
    std::map<std::string, std::string> out;
    if (visual) out["visual.json"] = visual->dump(2) + "\n";
    out["text.json"] = text_json().dump(2) + "\n";
    out["text.txt"] = text_plain();
    out["audio.json"] = audio_json().dump(2) + "\n";
    for (const auto& f : wav) {
      out[f.name] = f.bytes;
      out[f.name.substr(0, f.name.size() - 4) + ".cues.json"] = f.cues.dump(2) + "\n";
    }
    return out;
  }
};

inline std::vector<AudioSchedule> compile_audio(const Spec& spec, const Dataset& data, const ArtifactOptions& options) {
  if (!options.order) return schedule_all(spec, data, options.audio);
  std::vector<AudioSchedule> out;
  bool found = false;
  for (const auto& id : spec.composition.audio.units) {
    const auto* u = spec.audio_unit(id);
    if (!u || !find_encoding(u->encoding, Channel::pitch)) continue;
    if (!found) {
      // Orders that fix a step read the fixed value from the filter's equality on that step.
      std::vector<StepPosition> selection;
      std::vector<Predicate> terms;
      if (const auto* a = std::get_if<AndPredicate>(&options.audio.filter.node)) terms = a->terms;
      else terms = {options.audio.filter};
      for (const auto& t : terms) {
        if (const auto* eq = std::get_if<FieldEqual>(&t.node)) selection.push_back({eq->field, eq->value, std::nullopt, false});
        if (const auto* r = std::get_if<FieldRange>(&t.node)) {
          selection.push_back({r->field, std::nullopt, std::make_pair(r->lo, r->hi), r->closed});
        }
      }
      for (const auto& o : enumerate_playback_orders(*u, data, selection)) {
        if (o.descriptor != *options.order) continue;
        out.push_back(schedule_order(*u, spec, data, o, options.audio));
        found = true;
        break;
      }
      if (!found) throw Error("unknown-order", "no playback order '" + *options.order + "' for unit '" + u->id + "'");
      continue;
    }
    out.push_back(schedule(*u, spec, data, options.audio));
  }
  return out;
}

inline Artifacts compile_artifacts(const Spec& spec, const Dataset& raw, const ArtifactOptions& options = {}) {
  require_valid(spec);
  const Dataset data = drop_invalid_rows(spec, typed_for(spec, raw));
  Artifacts a;
  if (!spec.visual_units.empty()) a.visual = compile_visual(spec, data);
  a.tree = build_tree(spec, data);
  a.schedules = compile_audio(spec, data, options);
  a.audio_composition = spec.composition.audio;
  if (options.wav) a.wav = render_wav(a.schedules, a.audio_composition, options.sample_rate);
  return a;
}

}  // namespace mmr
