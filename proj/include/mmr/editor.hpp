#pragma once

// Structured editing: every atomic action maps a valid editor state to
// another valid editor state. available_actions lists only such actions.

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mmr/dataset.hpp"
#include "mmr/defaults.hpp"
#include "mmr/spec.hpp"

namespace mmr {

enum class Tab { data, fields, visual, audio };

inline constexpr Tab kTabs[] = {Tab::data, Tab::fields, Tab::visual, Tab::audio};

inline std::string_view to_string(Tab t) {
  switch (t) {
    case Tab::data: return "data";
    case Tab::fields: return "fields";
    case Tab::visual: return "visual";
    case Tab::audio: return "audio";
  }
  return "data";
}

inline Tab tab_from_string(std::string_view s) {
  for (auto t : kTabs) {
    if (to_string(t) == s) return t;
  }
  throw Error("malformed-action", "unknown tab '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Actions

// Empty content loads an empty dataset, which clears the session.
struct LoadDataset {
  std::string name;
  DataFormat format = DataFormat::csv;
  std::string content;
  std::shared_ptr<const Dataset> dataset;  // parsed form of `content`

  bool operator==(const LoadDataset& o) const {
    return name == o.name && format == o.format && content == o.content;
  }
};

struct ToggleField {
  std::string field;
  bool operator==(const ToggleField&) const = default;
};

struct SetMeasureType {
  std::string field;
  MeasureType type = MeasureType::nominal;
  bool operator==(const SetMeasureType&) const = default;
};

// Without a target this sets the field's transform; with one it sets (or,
// with no transform, clears) that channel's override.
struct SetTransform {
  std::string field;
  std::optional<EncodingRef> target;
  std::optional<Transform> transform;
  bool operator==(const SetTransform&) const = default;
};

struct AddEncoding {
  EncodingRef target;
  std::string field;
  bool operator==(const AddEncoding&) const = default;
};

struct RemoveEncoding {
  EncodingRef target;
  bool operator==(const RemoveEncoding&) const = default;
};

struct MoveEncoding {
  EncodingRef from;
  EncodingRef to;
  bool operator==(const MoveEncoding&) const = default;
};

struct SetMark {
  std::string unit;
  Mark mark = Mark::point;
  bool operator==(const SetMark&) const = default;
};

struct AddUnit {
  Modality modality = Modality::visual;
  bool operator==(const AddUnit&) const = default;
};

struct RemoveUnit {
  Modality modality = Modality::visual;
  std::string unit;
  bool operator==(const RemoveUnit&) const = default;
};

struct SetTraversal {
  std::string unit;
  std::vector<TraversalStep> traversal;
  bool operator==(const SetTraversal&) const = default;
};

struct SetComposition {
  Modality modality = Modality::visual;
  CompositionOp op = CompositionOp::layer;
  std::vector<std::string> order;  // empty keeps the current order
  bool operator==(const SetComposition&) const = default;
};

struct SwitchTab {
  Tab tab = Tab::data;
  bool operator==(const SwitchTab&) const = default;
};

using EditAction = std::variant<LoadDataset, ToggleField, SetMeasureType, SetTransform, AddEncoding, RemoveEncoding,
                                MoveEncoding, SetMark, AddUnit, RemoveUnit, SetTraversal, SetComposition, SwitchTab>;

inline LoadDataset load_action(std::string name, DataFormat format, std::string content) {
  LoadDataset a{std::move(name), format, std::move(content), nullptr};
  a.dataset = std::make_shared<const Dataset>(a.content.empty() ? Dataset{} : load_typed(a.content, format));
  return a;
}

// ---------------------------------------------------------------------------
// State

struct EditorState {
  std::shared_ptr<const Dataset> dataset;
  std::string dataset_name;
  std::vector<std::string> selected;  // dataset column order
  Spec spec;
  Tab tab = Tab::data;
  bool dirty_defaults = false;  // true once the spec has been edited by hand

  bool has_rows() const { return dataset && !dataset->empty() && dataset->row_count() > 0; }

  bool operator==(const EditorState& o) const {
    const bool same_data = (!dataset && !o.dataset) || (dataset && o.dataset && *dataset == *o.dataset);
    return same_data && dataset_name == o.dataset_name && selected == o.selected && spec == o.spec && tab == o.tab &&
           dirty_defaults == o.dirty_defaults;
  }
};

inline ValidationReport check_state(const EditorState& state) {
  ValidationReport out = validate(state.spec);
  for (std::size_t i = 0; i < state.selected.size(); ++i) {
    if (!state.dataset || !state.dataset->column_index(state.selected[i])) {
      out.push_back({"unknown-selected-field", "/selected/" + std::to_string(i),
                     "selected field '" + state.selected[i] + "' is not a dataset column"});
    }
  }
  for (std::size_t i = 0; i < state.spec.fields.size(); ++i) {
    const auto& name = state.spec.fields[i].name;
    if (std::find(state.selected.begin(), state.selected.end(), name) == state.selected.end()) {
      out.push_back({"unselected-field", "/fields/" + std::to_string(i), "field '" + name + "' is not selected"});
    }
  }
  return out;
}

class InvalidAction : public Error {
 public:
  InvalidAction(const std::string& message, ValidationReport report = {})
      : Error("invalid-action", message), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

inline std::vector<UnitEncoding>* unit_encodings(Spec& spec, const EncodingRef& r) {
  if (r.modality == Modality::visual) {
    for (auto& u : spec.visual_units) {
      if (u.id == r.unit) return &u.encoding;
    }
  } else {
    for (auto& u : spec.audio_units) {
      if (u.id == r.unit) return &u.encoding;
    }
  }
  return nullptr;
}

inline std::vector<UnitEncoding>& require_unit_encodings(Spec& spec, const EncodingRef& r) {
  if (channel_modality(r.channel) != r.modality) {
    throw InvalidAction("channel " + std::string(to_string(r.channel)) + " does not belong to the " +
                        std::string(to_string(r.modality)) + " modality");
  }
  auto* enc = unit_encodings(spec, r);
  if (!enc) throw InvalidAction("unknown unit '" + r.unit + "'");
  return *enc;
}

inline std::vector<UnitEncoding>::iterator require_binding(std::vector<UnitEncoding>& enc, const EncodingRef& r) {
  auto it = std::find_if(enc.begin(), enc.end(), [&](const UnitEncoding& e) { return e.channel == r.channel; });
  if (it == enc.end()) throw InvalidAction("channel " + std::string(to_string(r.channel)) + " of '" + r.unit + "' is unbound");
  return it;
}

inline void remove_field(Spec& spec, const std::string& name) {
  std::erase_if(spec.fields, [&](const FieldDef& f) { return f.name == name; });
  std::erase(spec.key, name);
  for (auto& u : spec.visual_units) std::erase_if(u.encoding, [&](const UnitEncoding& e) { return e.field == name; });
  for (auto& u : spec.audio_units) {
    std::erase_if(u.encoding, [&](const UnitEncoding& e) { return e.field == name; });
    std::erase_if(u.traversal, [&](const TraversalStep& s) { return s.field == name; });
    if (u.traversal.empty()) u.encoding.clear();
  }
  rebuild_refs(spec);
}

inline void add_field(Spec& spec, const Dataset& data, const std::string& name) {
  const auto idx = data.require_column(name);
  FieldDef f{name, data.type_of(name), {}, {}};
  auto pos = std::find_if(spec.fields.begin(), spec.fields.end(), [&](const FieldDef& g) {
    auto gi = data.column_index(g.name);
    return gi && *gi > idx;
  });
  spec.fields.insert(pos, std::move(f));
}

inline std::string next_unit_id(const Spec& spec, Modality m) {
  const std::string prefix = std::string(to_string(m)) + "_";
  for (std::size_t n = 0;; ++n) {
    const std::string id = prefix + std::to_string(n);
    if (!spec.visual_unit(id) && !spec.audio_unit(id)) return id;
  }
}

inline Composition& composition_of(Spec& spec, Modality m) {
  return m == Modality::visual ? spec.composition.visual : spec.composition.audio;
}

inline std::vector<std::string> selection_order(const Dataset& data, std::vector<std::string> selected) {
  std::vector<std::string> out;
  for (const auto& c : data.columns()) {
    if (std::find(selected.begin(), selected.end(), c.name) != selected.end()) out.push_back(c.name);
  }
  return out;
}

inline const Dataset& require_data(const EditorState& s) {
  if (!s.has_rows()) throw InvalidAction("no non-empty dataset is loaded");
  return *s.dataset;
}

inline void require_field(const Spec& spec, const std::string& name) {
  if (!spec.field(name)) throw InvalidAction("unknown field '" + name + "'");
}

struct Applier {
  const EditorState& in;
  EditorState out;

  void operator()(const LoadDataset& a) {
    out = EditorState{};
    out.tab = in.tab;
    out.dataset = a.dataset ? a.dataset
                            : std::make_shared<const Dataset>(a.content.empty() ? Dataset{} : load_typed(a.content, a.format));
    out.dataset_name = a.name;
    if (out.has_rows()) {
      for (const auto& c : out.dataset->columns()) out.selected.push_back(c.name);
      out.spec = default_spec(*out.dataset, out.selected);
    }
  }

  void operator()(const ToggleField& a) {
    const Dataset& data = require_data(in);
    data.require_column(a.field);
    auto sel = in.selected;
    const bool on = std::find(sel.begin(), sel.end(), a.field) == sel.end();
    if (on) sel.push_back(a.field);
    else std::erase(sel, a.field);
    out.selected = selection_order(data, sel);
    if (!in.dirty_defaults) {
      out.spec = out.selected.empty() ? Spec{} : default_spec(data, out.selected);
    } else if (on) {
      add_field(out.spec, data, a.field);
    } else {
      remove_field(out.spec, a.field);
    }
  }

  void operator()(const SetMeasureType& a) {
    const Dataset& data = require_data(in);
    require_field(out.spec, a.field);
    if (!admits_type(data, a.field, a.type)) {
      throw InvalidAction("field '" + a.field + "' cannot be read as " + std::string(to_string(a.type)));
    }
    out.spec.field(a.field)->type = a.type;
    out.dirty_defaults = true;
  }

  void operator()(const SetTransform& a) {
    require_data(in);
    require_field(out.spec, a.field);
    if (!a.target) {
      out.spec.field(a.field)->transform = a.transform.value_or(Transform{});
    } else {
      auto& enc = require_unit_encodings(out.spec, *a.target);
      auto it = require_binding(enc, *a.target);
      if (it->field != a.field) throw InvalidAction("channel is bound to '" + it->field + "', not '" + a.field + "'");
      it->override_transform = a.transform;
    }
    out.dirty_defaults = true;
  }

  void operator()(const AddEncoding& a) {
    require_data(in);
    require_field(out.spec, a.field);
    auto& enc = require_unit_encodings(out.spec, a.target);
    if (find_encoding(enc, a.target.channel)) {
      throw InvalidAction("channel " + std::string(to_string(a.target.channel)) + " of '" + a.target.unit + "' is already bound");
    }
    enc.push_back({a.target.channel, a.field, std::nullopt});
    rebuild_refs(out.spec);
    out.dirty_defaults = true;
  }

  void operator()(const RemoveEncoding& a) {
    require_data(in);
    auto& enc = require_unit_encodings(out.spec, a.target);
    enc.erase(require_binding(enc, a.target));
    rebuild_refs(out.spec);
    out.dirty_defaults = true;
  }

  void operator()(const MoveEncoding& a) {
    require_data(in);
    auto& from = require_unit_encodings(out.spec, a.from);
    auto it = require_binding(from, a.from);
    UnitEncoding moved = *it;
    from.erase(it);
    auto& to = require_unit_encodings(out.spec, a.to);
    if (find_encoding(to, a.to.channel)) {
      throw InvalidAction("channel " + std::string(to_string(a.to.channel)) + " of '" + a.to.unit + "' is already bound");
    }
    moved.channel = a.to.channel;
    to.push_back(std::move(moved));
    rebuild_refs(out.spec);
    out.dirty_defaults = true;
  }

  void operator()(const SetMark& a) {
    require_data(in);
    auto u = std::find_if(out.spec.visual_units.begin(), out.spec.visual_units.end(),
                          [&](const VisualUnit& v) { return v.id == a.unit; });
    if (u == out.spec.visual_units.end()) throw InvalidAction("unknown visual unit '" + a.unit + "'");
    u->mark = a.mark;
    out.dirty_defaults = true;
  }

  // A new unit joins a layer on the layer's terms: visual units take the
  // shared facet, audio units take the shared traversal.
  void operator()(const AddUnit& a) {
    require_data(in);
    const std::string id = next_unit_id(out.spec, a.modality);
    if (a.modality == Modality::visual) {
      VisualUnit u{id, Mark::point, {}};
      if (out.spec.composition.visual.op == CompositionOp::layer) {
        for (const auto& v : out.spec.visual_units) {
          if (const auto* f = find_encoding(v.encoding, Channel::facet)) {
            u.encoding.push_back({Channel::facet, f->field, std::nullopt});
            break;
          }
        }
      }
      out.spec.visual_units.push_back(std::move(u));
    } else {
      AudioUnit u{id, {}, {}};
      if (out.spec.composition.audio.op == CompositionOp::layer && !out.spec.audio_units.empty()) {
        u.traversal = out.spec.audio_units.front().traversal;
      }
      out.spec.audio_units.push_back(std::move(u));
    }
    composition_of(out.spec, a.modality).units.push_back(id);
    rebuild_refs(out.spec);
    out.dirty_defaults = true;
  }

  void operator()(const RemoveUnit& a) {
    require_data(in);
    std::size_t removed = 0;
    if (a.modality == Modality::visual) {
      removed = std::erase_if(out.spec.visual_units, [&](const VisualUnit& u) { return u.id == a.unit; });
    } else {
      removed = std::erase_if(out.spec.audio_units, [&](const AudioUnit& u) { return u.id == a.unit; });
    }
    if (removed == 0) throw InvalidAction("unknown unit '" + a.unit + "'");
    std::erase(composition_of(out.spec, a.modality).units, a.unit);
    rebuild_refs(out.spec);
    out.dirty_defaults = true;
  }

  // Layered audio units share one traversal, so setting it sets all of them.
  void operator()(const SetTraversal& a) {
    require_data(in);
    if (!out.spec.audio_unit(a.unit)) throw InvalidAction("unknown audio unit '" + a.unit + "'");
    const bool shared = out.spec.composition.audio.op == CompositionOp::layer;
    for (auto& u : out.spec.audio_units) {
      if (u.id == a.unit || shared) u.traversal = a.traversal;
    }
    out.dirty_defaults = true;
  }

  void operator()(const SetComposition& a) {
    require_data(in);
    auto& comp = composition_of(out.spec, a.modality);
    if (!a.order.empty()) {
      auto sorted_new = a.order;
      auto sorted_old = comp.units;
      std::sort(sorted_new.begin(), sorted_new.end());
      std::sort(sorted_old.begin(), sorted_old.end());
      if (sorted_new != sorted_old) throw InvalidAction("composition order must list every unit exactly once");
      comp.units = a.order;
    }
    comp.op = a.op;
    out.dirty_defaults = true;
  }

  void operator()(const SwitchTab& a) { out.tab = a.tab; }
};

}  // namespace detail

// Throws InvalidAction when the action does not apply to `state` or would
// leave it invalid; the exception carries the violations.
inline EditorState apply_edit(const EditorState& state, const EditAction& action) {
  detail::Applier applier{state, state};
  try {
    std::visit(applier, action);
  } catch (const InvalidAction&) {
    throw;
  } catch (const Error& e) {
    throw InvalidAction(e.what(), {{e.code(), "", e.what()}});
  }
  auto report = check_state(applier.out);
  if (!report.empty()) throw InvalidAction("action leads to an invalid state", std::move(report));
  return std::move(applier.out);
}

// ---------------------------------------------------------------------------
// Available actions

namespace detail {

inline std::vector<Transform> transform_choices(MeasureType type) {
  std::vector<Transform> out{Transform{}};
  for (auto a : kAggregates) out.push_back({a, false, std::nullopt});
  if (is_continuous(type)) out.push_back({std::nullopt, true, std::nullopt});
  return out;
}

inline std::vector<EncodingRef> slots(const Spec& spec) {
  std::vector<EncodingRef> out;
  for (const auto& u : spec.visual_units) {
    for (auto c : kVisualChannels) out.push_back({Modality::visual, u.id, c});
  }
  for (const auto& u : spec.audio_units) {
    for (auto c : kAudioChannels) out.push_back({Modality::audio, u.id, c});
  }
  return out;
}

inline const UnitEncoding* binding(const Spec& spec, const EncodingRef& r) {
  if (r.modality == Modality::visual) {
    const auto* u = spec.visual_unit(r.unit);
    return u ? find_encoding(u->encoding, r.channel) : nullptr;
  }
  const auto* u = spec.audio_unit(r.unit);
  return u ? find_encoding(u->encoding, r.channel) : nullptr;
}

inline std::vector<std::vector<TraversalStep>> traversal_choices(const Spec& spec, const AudioUnit& u) {
  std::vector<std::vector<TraversalStep>> out;
  const auto& t = u.traversal;
  for (const auto& f : spec.fields) {
    if (std::any_of(t.begin(), t.end(), [&](const TraversalStep& s) { return s.field == f.name; })) continue;
    auto next = t;
    next.push_back({f.name, false, std::nullopt});
    out.push_back(next);
    if (is_continuous(f.type)) {
      next.back().bin = true;
      out.push_back(std::move(next));
    }
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto without = t;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(without));
    if (i > 0) {
      auto swapped = t;
      std::swap(swapped[i - 1], swapped[i]);
      out.push_back(std::move(swapped));
    }
    if (is_continuous(field_type(spec, t[i].field))) {
      auto flipped = t;
      flipped[i].bin = !flipped[i].bin;
      flipped[i].bin_count.reset();
      out.push_back(std::move(flipped));
    }
  }
  return out;
}

}  // namespace detail

// Every listed action applied to `state` yields a valid state. `catalog`
// supplies the datasets a LoadDataset may name; without one, the blank load
// (which clears the session) is listed.
inline std::vector<EditAction> available_actions(const EditorState& state, const std::vector<LoadDataset>& catalog = {}) {
  std::vector<EditAction> out;
  if (catalog.empty()) out.push_back(LoadDataset{});
  for (const auto& l : catalog) out.push_back(l);
  for (auto t : kTabs) {
    if (t != state.tab) out.push_back(SwitchTab{t});
  }
  if (!state.has_rows()) return out;

  const Dataset& data = *state.dataset;
  const Spec& spec = state.spec;

  // Regenerated defaults are valid by construction and a manual toggle only
  // cascades removals, so toggles skip the trial application.
  for (const auto& c : data.columns()) out.push_back(ToggleField{c.name});

  std::vector<EditAction> candidates;
  for (const auto& f : spec.fields) {
    for (auto t : {MeasureType::quantitative, MeasureType::nominal, MeasureType::ordinal, MeasureType::temporal}) {
      if (t != f.type && admits_type(data, f.name, t)) candidates.push_back(SetMeasureType{f.name, t});
    }
    for (const auto& t : detail::transform_choices(f.type)) {
      if (t != f.transform) candidates.push_back(SetTransform{f.name, std::nullopt, t});
    }
  }
  const auto slots = detail::slots(spec);
  for (const auto& slot : slots) {
    const auto* b = detail::binding(spec, slot);
    if (!b) {
      for (const auto& f : spec.fields) candidates.push_back(AddEncoding{slot, f.name});
      continue;
    }
    candidates.push_back(RemoveEncoding{slot});
    if (b->override_transform) candidates.push_back(SetTransform{b->field, slot, std::nullopt});
    for (const auto& t : detail::transform_choices(field_type(spec, b->field))) {
      if (!b->override_transform || *b->override_transform != t) candidates.push_back(SetTransform{b->field, slot, t});
    }
    for (const auto& to : slots) {
      if (!detail::binding(spec, to)) candidates.push_back(MoveEncoding{slot, to});
    }
  }
  for (const auto& u : spec.visual_units) {
    for (auto m : kMarks) {
      if (m != u.mark) candidates.push_back(SetMark{u.id, m});
    }
    candidates.push_back(RemoveUnit{Modality::visual, u.id});
  }
  for (const auto& u : spec.audio_units) {
    for (auto& t : detail::traversal_choices(spec, u)) candidates.push_back(SetTraversal{u.id, std::move(t)});
    candidates.push_back(RemoveUnit{Modality::audio, u.id});
  }
  candidates.push_back(AddUnit{Modality::visual});
  candidates.push_back(AddUnit{Modality::audio});
  for (auto m : {Modality::visual, Modality::audio}) {
    const auto& comp = m == Modality::visual ? spec.composition.visual : spec.composition.audio;
    const auto other = comp.op == CompositionOp::layer ? CompositionOp::concat : CompositionOp::layer;
    candidates.push_back(SetComposition{m, other, {}});
    if (comp.units.size() > 1) {
      auto rotated = comp.units;
      std::rotate(rotated.begin(), rotated.begin() + 1, rotated.end());
      candidates.push_back(SetComposition{m, comp.op, rotated});
    }
  }

  for (auto& a : candidates) {
    try {
      apply_edit(state, a);
      out.push_back(std::move(a));
    } catch (const InvalidAction&) {
    }
  }
  return out;
}

inline EditorState replay(const std::vector<EditAction>& log, EditorState state = {}) {
  for (const auto& a : log) state = apply_edit(state, a);
  return state;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline Json ref_json(const EncodingRef& r) {
  return Json{{"modality", to_string(r.modality)}, {"unit", r.unit}, {"channel", to_string(r.channel)}};
}

inline EncodingRef read_ref(const Json& j) {
  return {modality_from_string(j.at("modality").get<std::string>()), j.at("unit").get<std::string>(),
          channel_from_string(j.at("channel").get<std::string>())};
}

inline Json transform_json(const Transform& t) {
  Json j{{"aggregate", t.aggregate ? Json(to_string(*t.aggregate)) : Json(nullptr)}};
  if (t.bin) j["bin"] = true;
  if (t.bin_count) j["maxbins"] = *t.bin_count;
  return j;
}

inline Json steps_json(const std::vector<TraversalStep>& steps) {
  Json out = Json::array();
  for (const auto& s : steps) {
    Json sj{{"field", s.field}};
    if (s.bin) sj["bin"] = true;
    if (s.bin_count) sj["maxbins"] = *s.bin_count;
    out.push_back(sj);
  }
  return out;
}

}  // namespace detail

// `with_content` false drops dataset bytes, for listings.
inline Json to_json(const EditAction& action, bool with_content = true) {
  return std::visit(
      [&](const auto& a) -> Json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, LoadDataset>) {
          Json j{{"type", "load_dataset"}, {"name", a.name}, {"format", a.format == DataFormat::csv ? "csv" : "json"}};
          if (with_content) j["content"] = a.content;
          return j;
        } else if constexpr (std::is_same_v<T, ToggleField>) {
          return Json{{"type", "toggle_field"}, {"field", a.field}};
        } else if constexpr (std::is_same_v<T, SetMeasureType>) {
          return Json{{"type", "set_measure_type"}, {"field", a.field}, {"measure_type", to_string(a.type)}};
        } else if constexpr (std::is_same_v<T, SetTransform>) {
          Json j{{"type", "set_transform"}, {"field", a.field}};
          if (a.target) j["target"] = detail::ref_json(*a.target);
          j["transform"] = a.transform ? detail::transform_json(*a.transform) : Json(nullptr);
          return j;
        } else if constexpr (std::is_same_v<T, AddEncoding>) {
          return Json{{"type", "add_encoding"}, {"target", detail::ref_json(a.target)}, {"field", a.field}};
        } else if constexpr (std::is_same_v<T, RemoveEncoding>) {
          return Json{{"type", "remove_encoding"}, {"target", detail::ref_json(a.target)}};
        } else if constexpr (std::is_same_v<T, MoveEncoding>) {
          return Json{{"type", "move_encoding"}, {"from", detail::ref_json(a.from)}, {"to", detail::ref_json(a.to)}};
        } else if constexpr (std::is_same_v<T, SetMark>) {
          return Json{{"type", "set_mark"}, {"unit", a.unit}, {"mark", to_string(a.mark)}};
        } else if constexpr (std::is_same_v<T, AddUnit>) {
          return Json{{"type", "add_unit"}, {"modality", to_string(a.modality)}};
        } else if constexpr (std::is_same_v<T, RemoveUnit>) {
          return Json{{"type", "remove_unit"}, {"modality", to_string(a.modality)}, {"unit", a.unit}};
        } else if constexpr (std::is_same_v<T, SetTraversal>) {
          return Json{{"type", "set_traversal"}, {"unit", a.unit}, {"traversal", detail::steps_json(a.traversal)}};
        } else if constexpr (std::is_same_v<T, SetComposition>) {
          return Json{{"type", "set_composition"}, {"modality", to_string(a.modality)}, {"op", to_string(a.op)},
                      {"order", a.order}};
        } else {
          return Json{{"type", "switch_tab"}, {"tab", to_string(a.tab)}};
        }
      },
      action);
}

inline EditAction action_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw Error("malformed-action", "action must be a JSON object");
    const std::string type = j.at("type").get<std::string>();
    if (type == "load_dataset") {
      const std::string format = j.value("format", "csv");
      if (format != "csv" && format != "json") throw Error("malformed-action", "format must be csv or json");
      return load_action(j.value("name", ""), format == "csv" ? DataFormat::csv : DataFormat::json_records,
                         j.value("content", ""));
    }
    if (type == "toggle_field") return ToggleField{j.at("field").get<std::string>()};
    if (type == "set_measure_type") {
      return SetMeasureType{j.at("field").get<std::string>(),
                            measure_type_from_string(j.at("measure_type").get<std::string>())};
    }
    if (type == "set_transform") {
      SetTransform a{j.at("field").get<std::string>(), std::nullopt, std::nullopt};
      if (j.contains("target") && !j["target"].is_null()) a.target = detail::read_ref(j["target"]);
      if (j.contains("transform") && !j["transform"].is_null()) a.transform = detail::read_transform(j["transform"]);
      return a;
    }
    if (type == "add_encoding") return AddEncoding{detail::read_ref(j.at("target")), j.at("field").get<std::string>()};
    if (type == "remove_encoding") return RemoveEncoding{detail::read_ref(j.at("target"))};
    if (type == "move_encoding") return MoveEncoding{detail::read_ref(j.at("from")), detail::read_ref(j.at("to"))};
    if (type == "set_mark") return SetMark{j.at("unit").get<std::string>(), mark_from_string(j.at("mark").get<std::string>())};
    if (type == "add_unit") return AddUnit{modality_from_string(j.at("modality").get<std::string>())};
    if (type == "remove_unit") {
      return RemoveUnit{modality_from_string(j.at("modality").get<std::string>()), j.at("unit").get<std::string>()};
    }
    if (type == "set_traversal") {
      SetTraversal a{j.at("unit").get<std::string>(), {}};
      for (const auto& sj : j.at("traversal")) {
        TraversalStep s{sj.at("field").get<std::string>(), sj.value("bin", false), std::nullopt};
        if (sj.contains("maxbins")) s.bin_count = sj["maxbins"].get<int>();
        a.traversal.push_back(std::move(s));
      }
      return a;
    }
    if (type == "set_composition") {
      return SetComposition{modality_from_string(j.at("modality").get<std::string>()),
                            composition_from_string(j.at("op").get<std::string>()),
                            j.value("order", std::vector<std::string>{})};
    }
    if (type == "switch_tab") return SwitchTab{tab_from_string(j.at("tab").get<std::string>())};
    throw Error("malformed-action", "unknown action type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed-action", std::string("malformed action: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    if (e.code() == "malformed-action") throw;
    throw Error("malformed-action", e.what());
  }
}

inline Json to_json(const EditorState& s) {
  Json dataset = nullptr;
  if (s.dataset) {
    Json cols = Json::array();
    for (const auto& c : s.dataset->columns()) {
      cols.push_back({{"name", c.name}, {"type", to_string(c.type.value_or(MeasureType::nominal))}});
    }
    dataset = Json{{"name", s.dataset_name}, {"columns", cols}, {"row_count", s.dataset->row_count()}};
  }
  return Json{{"dataset", dataset},
              {"selected", s.selected},
              {"tab", to_string(s.tab)},
              {"dirty_defaults", s.dirty_defaults},
              {"spec", to_json(s.spec)}};
}

}  // namespace mmr
