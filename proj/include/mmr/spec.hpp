#pragma once

// The multimodal specification: fields carrying encoding references, plus
// visual and audio units that point back at fields by name.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mmr/error.hpp"
#include "mmr/value.hpp"

namespace mmr {

enum class Modality { visual, audio };
enum class Channel { x, y, color, size, facet, order, pitch, volume };
enum class Mark { point, line, bar, area };
enum class Aggregate { mean, sum, count, min, max };
enum class CompositionOp { layer, concat };

inline constexpr Channel kVisualChannels[] = {Channel::x,    Channel::y,     Channel::color,
                                              Channel::size, Channel::facet, Channel::order};
inline constexpr Channel kAudioChannels[] = {Channel::pitch, Channel::volume};
inline constexpr Mark kMarks[] = {Mark::point, Mark::line, Mark::bar, Mark::area};
inline constexpr Aggregate kAggregates[] = {Aggregate::mean, Aggregate::sum, Aggregate::count,
                                            Aggregate::min, Aggregate::max};

inline std::string_view to_string(Modality m) { return m == Modality::visual ? "visual" : "audio"; }

inline std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::x: return "x";
    case Channel::y: return "y";
    case Channel::color: return "color";
    case Channel::size: return "size";
    case Channel::facet: return "facet";
    case Channel::order: return "order";
    case Channel::pitch: return "pitch";
    case Channel::volume: return "volume";
  }
  return "x";
}

inline std::string_view to_string(Mark m) {
  switch (m) {
    case Mark::point: return "point";
    case Mark::line: return "line";
    case Mark::bar: return "bar";
    case Mark::area: return "area";
  }
  return "point";
}

inline std::string_view to_string(Aggregate a) {
  switch (a) {
    case Aggregate::mean: return "mean";
    case Aggregate::sum: return "sum";
    case Aggregate::count: return "count";
    case Aggregate::min: return "min";
    case Aggregate::max: return "max";
  }
  return "mean";
}

inline std::string_view to_string(CompositionOp op) { return op == CompositionOp::layer ? "layer" : "concat"; }

inline Modality modality_from_string(std::string_view s) {
  if (s == "visual") return Modality::visual;
  if (s == "audio") return Modality::audio;
  throw Error("parse-error", "unknown modality '" + std::string(s) + "'");
}

inline Channel channel_from_string(std::string_view s) {
  for (auto c : kVisualChannels) {
    if (to_string(c) == s) return c;
  }
  for (auto c : kAudioChannels) {
    if (to_string(c) == s) return c;
  }
  throw Error("parse-error", "unknown channel '" + std::string(s) + "'");
}

inline Mark mark_from_string(std::string_view s) {
  for (auto m : kMarks) {
    if (to_string(m) == s) return m;
  }
  throw Error("parse-error", "unknown mark '" + std::string(s) + "'");
}

inline Aggregate aggregate_from_string(std::string_view s) {
  for (auto a : kAggregates) {
    if (to_string(a) == s) return a;
  }
  throw Error("parse-error", "unknown aggregate '" + std::string(s) + "'");
}

inline CompositionOp composition_from_string(std::string_view s) {
  if (s == "layer") return CompositionOp::layer;
  if (s == "concat") return CompositionOp::concat;
  throw Error("parse-error", "unknown composition '" + std::string(s) + "'");
}

inline Modality channel_modality(Channel c) {
  return (c == Channel::pitch || c == Channel::volume) ? Modality::audio : Modality::visual;
}

// ---------------------------------------------------------------------------
// Model

struct Transform {
  std::optional<Aggregate> aggregate;
  bool bin = false;
  std::optional<int> bin_count;  // nullopt = default bin count

  bool operator==(const Transform&) const = default;
};

struct EncodingRef {
  Modality modality = Modality::visual;
  std::string unit;
  Channel channel = Channel::x;

  bool operator==(const EncodingRef&) const = default;
};

struct FieldDef {
  std::string name;
  MeasureType type = MeasureType::nominal;
  Transform transform;
  std::vector<EncodingRef> encodings;

  bool operator==(const FieldDef&) const = default;
};

// One channel of a unit. `override_transform` shadows the field's transform.
struct UnitEncoding {
  Channel channel = Channel::x;
  std::string field;
  std::optional<Transform> override_transform;

  bool operator==(const UnitEncoding&) const = default;
};

struct VisualUnit {
  std::string id;
  Mark mark = Mark::point;
  std::vector<UnitEncoding> encoding;

  bool operator==(const VisualUnit&) const = default;
};

struct TraversalStep {
  std::string field;
  bool bin = false;
  std::optional<int> bin_count;

  bool operator==(const TraversalStep&) const = default;
};

struct AudioUnit {
  std::string id;
  std::vector<UnitEncoding> encoding;
  std::vector<TraversalStep> traversal;

  bool operator==(const AudioUnit&) const = default;
};

struct Composition {
  CompositionOp op = CompositionOp::layer;
  std::vector<std::string> units;

  bool operator==(const Composition&) const = default;
};

struct ViewComposition {
  Composition visual{CompositionOp::layer, {}};
  Composition audio{CompositionOp::concat, {}};

  bool operator==(const ViewComposition&) const = default;
};

struct Spec {
  std::vector<FieldDef> fields;
  std::vector<VisualUnit> visual_units;
  std::vector<AudioUnit> audio_units;
  ViewComposition composition;
  std::vector<std::string> key;

  const FieldDef* field(std::string_view name) const {
    for (const auto& f : fields) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
  FieldDef* field(std::string_view name) {
    for (auto& f : fields) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
  const VisualUnit* visual_unit(std::string_view id) const {
    for (const auto& u : visual_units) {
      if (u.id == id) return &u;
    }
    return nullptr;
  }
  const AudioUnit* audio_unit(std::string_view id) const {
    for (const auto& u : audio_units) {
      if (u.id == id) return &u;
    }
    return nullptr;
  }

  bool operator==(const Spec&) const = default;
};

inline const UnitEncoding* find_encoding(const std::vector<UnitEncoding>& enc, Channel c) {
  for (const auto& e : enc) {
    if (e.channel == c) return &e;
  }
  return nullptr;
}

// The transform in effect for one unit channel.
inline Transform effective_transform(const Spec& spec, const UnitEncoding& e) {
  if (e.override_transform) return *e.override_transform;
  if (const auto* f = spec.field(e.field)) return f->transform;
  return {};
}

inline MeasureType field_type(const Spec& spec, std::string_view name) {
  const auto* f = spec.field(name);
  return f ? f->type : MeasureType::nominal;
}

// Refreshes composition unit lists to the current unit order, keeping the ops.
inline void sync_composition(Spec& spec) {
  spec.composition.visual.units.clear();
  for (const auto& u : spec.visual_units) spec.composition.visual.units.push_back(u.id);
  spec.composition.audio.units.clear();
  for (const auto& u : spec.audio_units) spec.composition.audio.units.push_back(u.id);
}

// Rebuilds every field's encoding refs from the unit encodings.
inline void rebuild_refs(Spec& spec) {
  for (auto& f : spec.fields) f.encodings.clear();
  for (const auto& u : spec.visual_units) {
    for (const auto& e : u.encoding) {
      if (auto* f = spec.field(e.field)) f->encodings.push_back({Modality::visual, u.id, e.channel});
    }
  }
  for (const auto& u : spec.audio_units) {
    for (const auto& e : u.encoding) {
      if (auto* f = spec.field(e.field)) f->encodings.push_back({Modality::audio, u.id, e.channel});
    }
  }
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string code;
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

inline Json to_json(const ValidationReport& report) {
  Json out = Json::array();
  for (const auto& v : report) out.push_back({{"code", v.code}, {"path", v.path}, {"message", v.message}});
  return out;
}

namespace detail {

inline std::string unit_path(Modality m, std::size_t i) {
  return "/" + std::string(to_string(m)) + "/units/" + std::to_string(i);
}

inline void check_transform(const Transform& t, MeasureType type, const std::string& path,
                            ValidationReport& out) {
  if (t.bin && is_discrete(type)) {
    out.push_back({"bin-on-discrete", path, "bin requires a quantitative or temporal field"});
  }
  if (t.bin_count && (!t.bin || *t.bin_count < 1)) {
    out.push_back({"invalid-bin-count", path, "bin count needs bin enabled and a positive value"});
  }
}

inline void check_composition(const Composition& comp, const std::vector<std::string>& ids,
                              Modality m, ValidationReport& out) {
  const std::string path = "/" + std::string(to_string(m)) + "/composition";
  std::set<std::string> seen;
  for (const auto& id : comp.units) {
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      out.push_back({"composition-unknown-unit", path, "unit '" + id + "' is not defined"});
    } else if (!seen.insert(id).second) {
      out.push_back({"composition-duplicate-unit", path, "unit '" + id + "' appears twice"});
    }
  }
  for (const auto& id : ids) {
    if (std::find(comp.units.begin(), comp.units.end(), id) == comp.units.end()) {
      out.push_back({"composition-missing-unit", path, "unit '" + id + "' is not composed"});
    }
  }
}

}  // namespace detail

inline ValidationReport validate(const Spec& spec) {
  ValidationReport out;

  std::set<std::string> names;
  for (std::size_t i = 0; i < spec.fields.size(); ++i) {
    const auto& f = spec.fields[i];
    const std::string path = "/fields/" + std::to_string(i);
    if (f.name.empty()) out.push_back({"empty-field-name", path, "field name is empty"});
    if (!names.insert(f.name).second) {
      out.push_back({"duplicate-field", path, "field '" + f.name + "' is defined twice"});
    }
    detail::check_transform(f.transform, f.type, path + "/transform", out);
  }

  std::set<std::string> unit_ids;
  std::vector<std::string> visual_ids, audio_ids;
  auto note_unit = [&](const std::string& id, const std::string& path) {
    if (id.empty() || !unit_ids.insert(id).second) {
      out.push_back({"duplicate-unit-id", path, "unit id '" + id + "' is empty or already used"});
    }
  };
  for (std::size_t i = 0; i < spec.visual_units.size(); ++i) {
    note_unit(spec.visual_units[i].id, detail::unit_path(Modality::visual, i));
    visual_ids.push_back(spec.visual_units[i].id);
  }
  for (std::size_t i = 0; i < spec.audio_units.size(); ++i) {
    note_unit(spec.audio_units[i].id, detail::unit_path(Modality::audio, i));
    audio_ids.push_back(spec.audio_units[i].id);
  }

  // (unit, channel) groups from both sides of the reference.
  std::map<std::pair<std::string, Channel>, std::pair<int, int>> channel_uses;  // unit encs, refs

  auto check_unit_encodings = [&](Modality m, std::size_t ui, const std::string& id,
                                  const std::vector<UnitEncoding>& encs) {
    for (const auto& e : encs) {
      const std::string path =
          detail::unit_path(m, ui) + "/encoding/" + std::string(to_string(e.channel));
      ++channel_uses[{id, e.channel}].first;
      if (channel_modality(e.channel) != m) {
        out.push_back({"channel-modality-mismatch", path,
                       "channel '" + std::string(to_string(e.channel)) + "' is not a " +
                           std::string(to_string(m)) + " channel"});
      }
      const FieldDef* f = spec.field(e.field);
      if (!f) {
        out.push_back({"unknown-field", path, "field '" + e.field + "' is not defined"});
        continue;
      }
      const bool backed = std::any_of(f->encodings.begin(), f->encodings.end(), [&](const EncodingRef& r) {
        return r.modality == m && r.unit == id && r.channel == e.channel;
      });
      if (!backed) {
        out.push_back({"missing-backref", path,
                       "field '" + e.field + "' has no reference to this encoding"});
      }
      if (e.override_transform) detail::check_transform(*e.override_transform, f->type, path, out);
    }
  };
  for (std::size_t i = 0; i < spec.visual_units.size(); ++i) {
    const auto& u = spec.visual_units[i];
    check_unit_encodings(Modality::visual, i, u.id, u.encoding);
  }
  for (std::size_t i = 0; i < spec.audio_units.size(); ++i) {
    const auto& u = spec.audio_units[i];
    check_unit_encodings(Modality::audio, i, u.id, u.encoding);
    const std::string path = detail::unit_path(Modality::audio, i) + "/traversal";
    if (!u.encoding.empty() && u.traversal.empty()) {
      out.push_back({"empty-traversal", path, "audio unit with encodings needs a traversal"});
    }
    std::set<std::string> steps;
    for (std::size_t s = 0; s < u.traversal.size(); ++s) {
      const auto& step = u.traversal[s];
      const std::string sp = path + "/" + std::to_string(s);
      if (!steps.insert(step.field).second) {
        out.push_back({"duplicate-traversal-field", sp, "field '" + step.field + "' traversed twice"});
      }
      const FieldDef* f = spec.field(step.field);
      if (!f) {
        out.push_back({"unknown-traversal-field", sp, "field '" + step.field + "' is not defined"});
        continue;
      }
      detail::check_transform(Transform{std::nullopt, step.bin, step.bin_count}, f->type, sp, out);
    }
  }

  for (std::size_t i = 0; i < spec.fields.size(); ++i) {
    const auto& f = spec.fields[i];
    for (std::size_t r = 0; r < f.encodings.size(); ++r) {
      const auto& ref = f.encodings[r];
      const std::string path = "/fields/" + std::to_string(i) + "/encodings/" + std::to_string(r);
      ++channel_uses[{ref.unit, ref.channel}].second;
      if (channel_modality(ref.channel) != ref.modality) {
        out.push_back({"channel-modality-mismatch", path, "reference channel does not match its modality"});
      }
      const std::vector<UnitEncoding>* encs = nullptr;
      if (ref.modality == Modality::visual) {
        if (const auto* u = spec.visual_unit(ref.unit)) encs = &u->encoding;
      } else {
        if (const auto* u = spec.audio_unit(ref.unit)) encs = &u->encoding;
      }
      const bool resolved = encs && std::any_of(encs->begin(), encs->end(), [&](const UnitEncoding& e) {
                              return e.channel == ref.channel && e.field == f.name;
                            });
      if (!resolved) {
        out.push_back({"dangling-ref", path,
                       "reference to " + std::string(to_string(ref.modality)) + " unit '" + ref.unit +
                           "' channel '" + std::string(to_string(ref.channel)) + "' does not resolve"});
      }
    }
  }

  for (const auto& [key, counts] : channel_uses) {
    if (counts.first > 1 || counts.second > 1) {
      out.push_back({"duplicate-channel", "/units/" + key.first + "/encoding/" + std::string(to_string(key.second)),
                     "channel '" + std::string(to_string(key.second)) + "' of unit '" + key.first +
                         "' has more than one field"});
    }
  }

  detail::check_composition(spec.composition.visual, visual_ids, Modality::visual, out);
  detail::check_composition(spec.composition.audio, audio_ids, Modality::audio, out);

  if (spec.composition.audio.op == CompositionOp::layer && spec.audio_units.size() > 1) {
    for (std::size_t i = 1; i < spec.audio_units.size(); ++i) {
      if (spec.audio_units[i].traversal != spec.audio_units[0].traversal) {
        out.push_back({"layered-traversal-mismatch", detail::unit_path(Modality::audio, i) + "/traversal",
                       "layered audio units must share one traversal"});
      }
    }
  }
  if (spec.composition.visual.op == CompositionOp::layer) {
    std::optional<std::string> facet;
    for (std::size_t i = 0; i < spec.visual_units.size(); ++i) {
      const auto* e = find_encoding(spec.visual_units[i].encoding, Channel::facet);
      if (!e) continue;
      if (facet && *facet != e->field) {
        out.push_back({"layered-facet-mismatch", detail::unit_path(Modality::visual, i) + "/encoding/facet",
                       "layered visual units must facet by the same field"});
      }
      facet = e->field;
    }
  }

  std::set<std::string> key_seen;
  for (std::size_t i = 0; i < spec.key.size(); ++i) {
    if (!spec.field(spec.key[i])) {
      out.push_back({"unknown-key-field", "/key/" + std::to_string(i), "key field '" + spec.key[i] + "' is not defined"});
    } else if (!key_seen.insert(spec.key[i]).second) {
      out.push_back({"unknown-key-field", "/key/" + std::to_string(i), "key field '" + spec.key[i] + "' repeats"});
    }
  }
  return out;
}

inline bool is_valid(const Spec& spec) { return validate(spec).empty(); }

inline void require_valid(const Spec& spec) {
  auto report = validate(spec);
  if (!report.empty()) {
    throw Error("invalid-spec", report.front().code + " at " + report.front().path + ": " + report.front().message);
  }
}

// Canonical ordering for the lists the model treats as unordered: field
// references sort by (modality, unit position, encoding position).
inline Spec normalize(Spec spec) {
  auto position = [&](const EncodingRef& r) {
    std::size_t unit = 0, enc = 0;
    if (r.modality == Modality::visual) {
      for (std::size_t i = 0; i < spec.visual_units.size(); ++i) {
        if (spec.visual_units[i].id != r.unit) continue;
        unit = i;
        for (std::size_t j = 0; j < spec.visual_units[i].encoding.size(); ++j) {
          if (spec.visual_units[i].encoding[j].channel == r.channel) enc = j;
        }
      }
    } else {
      for (std::size_t i = 0; i < spec.audio_units.size(); ++i) {
        if (spec.audio_units[i].id != r.unit) continue;
        unit = i;
        for (std::size_t j = 0; j < spec.audio_units[i].encoding.size(); ++j) {
          if (spec.audio_units[i].encoding[j].channel == r.channel) enc = j;
        }
      }
    }
    return std::make_tuple(static_cast<int>(r.modality), unit, enc, static_cast<int>(r.channel), r.unit);
  };
  for (auto& f : spec.fields) {
    std::stable_sort(f.encodings.begin(), f.encodings.end(),
                     [&](const EncodingRef& a, const EncodingRef& b) { return position(a) < position(b); });
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Encoding-oriented view: fields nested inside each unit's encodings.

struct FieldSummary {
  std::string name;
  MeasureType type = MeasureType::nominal;
  Transform transform;

  bool operator==(const FieldSummary&) const = default;
};

struct EncodingDef {
  Channel channel = Channel::x;
  FieldSummary field;
  std::optional<Transform> override_transform;

  bool operator==(const EncodingDef&) const = default;
};

struct UnitView {
  Modality modality = Modality::visual;
  std::string id;
  std::optional<Mark> mark;  // visual units
  std::vector<EncodingDef> encoding;
  std::vector<TraversalStep> traversal;  // audio units

  bool operator==(const UnitView&) const = default;
};

struct EncodingOrientedView {
  std::vector<FieldSummary> fields;  // catalog, including unencoded fields
  std::vector<UnitView> units;
  ViewComposition composition;
  std::vector<std::string> key;

  bool operator==(const EncodingOrientedView&) const = default;
};

inline EncodingOrientedView to_encoding_view(const Spec& spec) {
  auto report = validate(spec);
  if (!report.empty()) throw Error("invalid-spec", "cannot project an invalid spec: " + report.front().code);
  EncodingOrientedView view;
  for (const auto& f : spec.fields) view.fields.push_back({f.name, f.type, f.transform});
  auto defs = [&](const std::vector<UnitEncoding>& encs) {
    std::vector<EncodingDef> out;
    for (const auto& e : encs) {
      const auto* f = spec.field(e.field);
      out.push_back({e.channel, {f->name, f->type, f->transform}, e.override_transform});
    }
    return out;
  };
  for (const auto& u : spec.visual_units) {
    view.units.push_back({Modality::visual, u.id, u.mark, defs(u.encoding), {}});
  }
  for (const auto& u : spec.audio_units) {
    view.units.push_back({Modality::audio, u.id, std::nullopt, defs(u.encoding), u.traversal});
  }
  view.composition = spec.composition;
  view.key = spec.key;
  return view;
}

inline Spec to_field_view(const EncodingOrientedView& view) {
  Spec spec;
  for (const auto& f : view.fields) spec.fields.push_back({f.name, f.type, f.transform, {}});
  std::set<std::pair<std::string, Channel>> claimed;
  for (const auto& u : view.units) {
    std::vector<UnitEncoding> encs;
    for (const auto& e : u.encoding) {
      if (!claimed.insert({u.id, e.channel}).second) {
        throw Error("inconsistent-view", "two encodings claim unit '" + u.id + "' channel '" +
                                             std::string(to_string(e.channel)) + "'");
      }
      auto* f = spec.field(e.field.name);
      if (!f) throw Error("inconsistent-view", "encoding names unknown field '" + e.field.name + "'");
      if (f->type != e.field.type || f->transform != e.field.transform) {
        throw Error("inconsistent-view", "field '" + e.field.name + "' is described two ways");
      }
      f->encodings.push_back({u.modality, u.id, e.channel});
      encs.push_back({e.channel, e.field.name, e.override_transform});
    }
    if (u.modality == Modality::visual) {
      spec.visual_units.push_back({u.id, u.mark.value_or(Mark::point), std::move(encs)});
    } else {
      spec.audio_units.push_back({u.id, std::move(encs), u.traversal});
    }
  }
  spec.composition = view.composition;
  spec.key = view.key;
  return normalize(std::move(spec));
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline void write_transform(Json& j, const Transform& t) {
  if (t.aggregate) j["aggregate"] = to_string(*t.aggregate);
  if (t.bin) j["bin"] = true;
  if (t.bin_count) j["maxbins"] = *t.bin_count;
}

inline Transform read_transform(const Json& j) {
  Transform t;
  if (j.contains("aggregate") && !j["aggregate"].is_null()) {
    t.aggregate = aggregate_from_string(j["aggregate"].get<std::string>());
  }
  if (j.contains("bin")) t.bin = j["bin"].get<bool>();
  if (j.contains("maxbins")) t.bin_count = j["maxbins"].get<int>();
  return t;
}

inline bool has_transform_keys(const Json& j) {
  return j.contains("aggregate") || j.contains("bin") || j.contains("maxbins");
}

inline Json encoding_entry(const UnitEncoding& e) {
  Json j{{"field", e.field}};
  if (e.override_transform) {
    // An override is always written with its aggregate slot so that an
    // override clearing the field's aggregate survives a round trip.
    j["aggregate"] = e.override_transform->aggregate ? Json(to_string(*e.override_transform->aggregate)) : Json(nullptr);
    if (e.override_transform->bin) j["bin"] = true;
    if (e.override_transform->bin_count) j["maxbins"] = *e.override_transform->bin_count;
  }
  return j;
}

inline Json encodings_json(const std::vector<UnitEncoding>& encs) {
  std::set<Channel> seen;
  bool dup = false;
  for (const auto& e : encs) dup |= !seen.insert(e.channel).second;
  if (!dup) {
    Json obj = Json::object();
    for (const auto& e : encs) obj[std::string(to_string(e.channel))] = encoding_entry(e);
    return obj;
  }
  Json arr = Json::array();
  for (const auto& e : encs) {
    Json entry{{"channel", to_string(e.channel)}};
    entry.update(encoding_entry(e));
    arr.push_back(entry);
  }
  return arr;
}

inline UnitEncoding read_encoding_entry(Channel c, const Json& j) {
  UnitEncoding e;
  e.channel = c;
  e.field = j.at("field").get<std::string>();
  if (has_transform_keys(j)) e.override_transform = read_transform(j);
  return e;
}

inline std::vector<UnitEncoding> read_encodings(const Json& j) {
  std::vector<UnitEncoding> out;
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) out.push_back(read_encoding_entry(channel_from_string(k), v));
  } else if (j.is_array()) {
    for (const auto& v : j) out.push_back(read_encoding_entry(channel_from_string(v.at("channel").get<std::string>()), v));
  } else {
    throw Error("parse-error", "unit encoding must be an object or array");
  }
  return out;
}

inline Json composition_json(Json section, const Composition& comp, const std::vector<std::string>& ids) {
  section["composition"] = to_string(comp.op);
  if (comp.units != ids) section["order"] = comp.units;
  return section;
}

inline Composition read_composition(const Json& section, const std::vector<std::string>& ids,
                                    CompositionOp fallback) {
  Composition c{fallback, ids};
  if (section.contains("composition")) c.op = composition_from_string(section["composition"].get<std::string>());
  if (section.contains("order")) c.units = section["order"].get<std::vector<std::string>>();
  return c;
}

}  // namespace detail

inline Json to_json(const Spec& spec) {
  Json j = Json::object();
  j["key"] = spec.key;
  Json fields = Json::array();
  for (const auto& f : spec.fields) {
    Json fj{{"name", f.name}, {"type", to_string(f.type)}};
    detail::write_transform(fj, f.transform);
    Json refs = Json::array();
    for (const auto& r : f.encodings) {
      refs.push_back({{"modality", to_string(r.modality)}, {"unit", r.unit}, {"channel", to_string(r.channel)}});
    }
    fj["encodings"] = refs;
    fields.push_back(fj);
  }
  j["fields"] = fields;

  Json vunits = Json::array();
  std::vector<std::string> vids;
  for (const auto& u : spec.visual_units) {
    vunits.push_back({{"unit", u.id}, {"mark", to_string(u.mark)}, {"encoding", detail::encodings_json(u.encoding)}});
    vids.push_back(u.id);
  }
  j["visual"] = detail::composition_json(Json{{"units", vunits}}, spec.composition.visual, vids);

  Json aunits = Json::array();
  std::vector<std::string> aids;
  for (const auto& u : spec.audio_units) {
    Json steps = Json::array();
    for (const auto& s : u.traversal) {
      Json sj{{"field", s.field}};
      if (s.bin) sj["bin"] = true;
      if (s.bin_count) sj["maxbins"] = *s.bin_count;
      steps.push_back(sj);
    }
    aunits.push_back({{"unit", u.id}, {"encoding", detail::encodings_json(u.encoding)}, {"traversal", steps}});
    aids.push_back(u.id);
  }
  j["audio"] = detail::composition_json(Json{{"units", aunits}}, spec.composition.audio, aids);
  return j;
}

inline Spec spec_from_json(const Json& j) {
  try {
    if (!j.is_object()) throw Error("parse-error", "spec must be a JSON object");
    Spec spec;
    if (j.contains("key")) spec.key = j["key"].get<std::vector<std::string>>();
    if (j.contains("fields")) {
      for (const auto& fj : j["fields"]) {
        FieldDef f;
        f.name = fj.at("name").get<std::string>();
        f.type = measure_type_from_string(fj.at("type").get<std::string>());
        f.transform = detail::read_transform(fj);
        if (fj.contains("encodings")) {
          for (const auto& rj : fj["encodings"]) {
            f.encodings.push_back({modality_from_string(rj.at("modality").get<std::string>()),
                                   rj.at("unit").get<std::string>(),
                                   channel_from_string(rj.at("channel").get<std::string>())});
          }
        }
        spec.fields.push_back(std::move(f));
      }
    }
    std::vector<std::string> vids, aids;
    if (j.contains("visual") && j["visual"].contains("units")) {
      for (const auto& uj : j["visual"]["units"]) {
        VisualUnit u;
        u.id = uj.at("unit").get<std::string>();
        u.mark = mark_from_string(uj.at("mark").get<std::string>());
        if (uj.contains("encoding")) u.encoding = detail::read_encodings(uj["encoding"]);
        vids.push_back(u.id);
        spec.visual_units.push_back(std::move(u));
      }
    }
    if (j.contains("audio") && j["audio"].contains("units")) {
      for (const auto& uj : j["audio"]["units"]) {
        AudioUnit u;
        u.id = uj.at("unit").get<std::string>();
        if (uj.contains("encoding")) u.encoding = detail::read_encodings(uj["encoding"]);
        if (uj.contains("traversal")) {
          for (const auto& sj : uj["traversal"]) {
            TraversalStep s;
            s.field = sj.at("field").get<std::string>();
            if (sj.contains("bin")) s.bin = sj["bin"].get<bool>();
            if (sj.contains("maxbins")) s.bin_count = sj["maxbins"].get<int>();
            u.traversal.push_back(std::move(s));
          }
        }
        aids.push_back(u.id);
        spec.audio_units.push_back(std::move(u));
      }
    }
    spec.composition.visual = detail::read_composition(j.value("visual", Json::object()), vids, CompositionOp::layer);
    spec.composition.audio = detail::read_composition(j.value("audio", Json::object()), aids, CompositionOp::concat);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error("parse-error", std::string("malformed spec: ") + e.what());
  }
}

inline Json to_json(const EncodingOrientedView& view) {
  Json fields = Json::array();
  for (const auto& f : view.fields) {
    Json fj{{"name", f.name}, {"type", to_string(f.type)}};
    detail::write_transform(fj, f.transform);
    fields.push_back(fj);
  }
  Json units = Json::array();
  for (const auto& u : view.units) {
    Json uj{{"modality", to_string(u.modality)}, {"unit", u.id}};
    if (u.mark) uj["mark"] = to_string(*u.mark);
    Json enc = Json::array();
    for (const auto& e : u.encoding) {
      Json fj{{"name", e.field.name}, {"type", to_string(e.field.type)}};
      detail::write_transform(fj, e.field.transform);
      Json ej{{"channel", to_string(e.channel)}, {"field", fj}};
      if (e.override_transform) {
        Json oj = Json::object();
        detail::write_transform(oj, *e.override_transform);
        ej["override"] = oj;
      }
      enc.push_back(ej);
    }
    uj["encoding"] = enc;
    if (u.modality == Modality::audio) {
      Json steps = Json::array();
      for (const auto& s : u.traversal) {
        Json sj{{"field", s.field}};
        if (s.bin) sj["bin"] = true;
        if (s.bin_count) sj["maxbins"] = *s.bin_count;
        steps.push_back(sj);
      }
      uj["traversal"] = steps;
    }
    units.push_back(uj);
  }
  return Json{{"key", view.key},
              {"fields", fields},
              {"units", units},
              {"composition",
               {{"visual", {{"op", to_string(view.composition.visual.op)}, {"units", view.composition.visual.units}}},
                {"audio", {{"op", to_string(view.composition.audio.op)}, {"units", view.composition.audio.units}}}}}};
}

}  // namespace mmr
