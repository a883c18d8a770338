#pragma once

// Compiles visual units to a Vega-Lite v5 document and reifies predicates
// as conditional opacity.

#include <string>
#include <vector>

#include "mmr/dataset.hpp"
#include "mmr/predicate.hpp"
#include "mmr/spec.hpp"

namespace mmr {

inline constexpr const char* kVegaLiteSchema = "https://vega.github.io/schema/vega-lite/v5.json";
inline constexpr int kFacetColumns = 4;
inline constexpr double kEmphasisOpacity = 1.0;
inline constexpr double kDeemphasisOpacity = 0.3;
inline constexpr const char* kBrushName = "brush";

// Vega-Lite reads `.` and brackets in field names as nested access.
inline std::string escape_field(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '.' || c == '[' || c == ']' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

namespace detail {

// Temporal cells travel as ISO strings that parse as UTC instants.
inline Json data_value(const Value& v, const Column& col) {
  if (is_null(v)) return nullptr;
  if (col.type == MeasureType::temporal && std::holds_alternative<double>(v)) {
    const double ms = std::get<double>(v);
    return temporal::format(ms, col.grain == TimeGrain::year ? TimeGrain::day : col.grain);
  }
  return to_json(v);
}

inline Json inline_values(const Spec& spec, const Dataset& data) {
  std::vector<std::size_t> cols;
  std::vector<std::string> names;
  for (const auto& f : spec.fields) {
    if (auto c = data.column_index(f.name)) {
      cols.push_back(*c);
      names.push_back(f.name);
    }
  }
  Json values = Json::array();
  for (const auto& row : data.rows()) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < cols.size(); ++i) obj[names[i]] = data_value(row[cols[i]], data.columns()[cols[i]]);
    values.push_back(std::move(obj));
  }
  return values;
}

inline Json field_def(const Spec& spec, const UnitEncoding& e, bool position) {
  const MeasureType type = field_type(spec, e.field);
  Json j{{"field", escape_field(e.field)}, {"type", to_string(type)}};
  const Transform t = effective_transform(spec, e);
  if (t.aggregate) j["aggregate"] = to_string(*t.aggregate);
  if (t.bin) {
    if (t.bin_count) j["bin"] = Json{{"maxbins", *t.bin_count}};
    else j["bin"] = true;
  }
  if (position && type == MeasureType::temporal && !t.bin) j["scale"] = Json{{"type", "utc"}};
  return j;
}

inline Json unit_json(const Spec& spec, const VisualUnit& u, bool with_brush) {
  Json enc = Json::object();
  std::vector<std::string> brush_channels;
  for (const auto& e : u.encoding) {
    if (e.channel == Channel::facet) continue;
    const bool position = e.channel == Channel::x || e.channel == Channel::y;
    enc[std::string(to_string(e.channel))] = field_def(spec, e, position);
    if (position) brush_channels.emplace_back(to_string(e.channel));
  }
  Json unit{{"mark", to_string(u.mark)}, {"encoding", enc}};
  if (with_brush) {
    Json select{{"type", "interval"}};
    if (!brush_channels.empty()) select["encodings"] = brush_channels;
    unit["params"] = Json::array({Json{{"name", kBrushName}, {"select", select}}});
  }
  return unit;
}

inline Json facet_json(const Spec& spec, const std::string& field) {
  return Json{{"field", escape_field(field)}, {"type", to_string(field_type(spec, field))}};
}

}  // namespace detail

inline Json compile_visual(const Spec& spec, const Dataset& data) {
  if (spec.visual_units.empty()) throw Error("no-visual-units", "the spec has no visual units");
  require_valid(spec);

  std::vector<const VisualUnit*> units;
  for (const auto& id : spec.composition.visual.units) units.push_back(spec.visual_unit(id));

  Json doc{{"$schema", kVegaLiteSchema}, {"data", {{"values", detail::inline_values(spec, data)}}}};
  const bool layered = spec.composition.visual.op == CompositionOp::layer;

  if (units.size() == 1 || layered) {
    std::optional<std::string> facet;
    for (const auto* u : units) {
      if (const auto* e = find_encoding(u->encoding, Channel::facet)) facet = e->field;
    }
    Json body;
    if (units.size() == 1) {
      body = detail::unit_json(spec, *units[0], true);
    } else {
      Json layer = Json::array();
      for (std::size_t i = 0; i < units.size(); ++i) layer.push_back(detail::unit_json(spec, *units[i], i == 0));
      body = Json{{"layer", layer}};
    }
    if (facet) {
      doc["facet"] = detail::facet_json(spec, *facet);
      doc["columns"] = kFacetColumns;
      doc["spec"] = body;
    } else {
      doc.update(body);
    }
    return doc;
  }

  Json parts = Json::array();
  for (std::size_t i = 0; i < units.size(); ++i) {
    Json unit = detail::unit_json(spec, *units[i], i == 0);
    if (const auto* e = find_encoding(units[i]->encoding, Channel::facet)) {
      parts.push_back(Json{{"facet", detail::facet_json(spec, e->field)}, {"columns", kFacetColumns}, {"spec", unit}});
    } else {
      parts.push_back(unit);
    }
  }
  doc["concat"] = parts;
  return doc;
}

// ---------------------------------------------------------------------------
// Highlight

namespace detail {

inline Json date_time(double ms, TimeGrain grain) {
  const auto c = temporal::to_civil(ms);
  Json j{{"year", c.year}, {"month", c.month}, {"date", c.day}};
  if (grain == TimeGrain::datetime) {
    j["hours"] = c.hour;
    j["minutes"] = c.minute;
    j["seconds"] = c.second;
    j["milliseconds"] = c.millisecond;
  }
  j["utc"] = true;
  return j;
}

inline Json test_value(const Value& wire, const Column& col) {
  const Value typed = coerce_to_column(wire, col);
  if (col.type == MeasureType::temporal && std::holds_alternative<double>(typed)) {
    return date_time(std::get<double>(typed), col.grain);
  }
  if (is_null(typed)) return to_json(wire);
  return to_json(typed);
}

inline Json lower_test(const Predicate& p, const Dataset& data) {
  return std::visit(
      [&](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TruePredicate>) {
          return "true";
        } else if constexpr (std::is_same_v<T, FieldEqual>) {
          const Column& c = data.column(n.field);
          return Json{{"field", escape_field(n.field)}, {"equal", test_value(n.value, c)}};
        } else if constexpr (std::is_same_v<T, FieldRange>) {
          const Column& c = data.column(n.field);
          const std::string f = escape_field(n.field);
          return Json{{"and", Json::array({Json{{"field", f}, {"gte", test_value(n.lo, c)}},
                                           Json{{"field", f}, {n.closed ? "lte" : "lt", test_value(n.hi, c)}}})}};
        } else if constexpr (std::is_same_v<T, FieldOneOf>) {
          const Column& c = data.column(n.field);
          Json vals = Json::array();
          for (const auto& v : n.values) vals.push_back(test_value(v, c));
          return Json{{"field", escape_field(n.field)}, {"oneOf", vals}};
        } else {
          Json terms = Json::array();
          for (const auto& t : n.terms) {
            if (!t.is_true()) terms.push_back(lower_test(t, data));
          }
          if (terms.empty()) return "true";
          return Json{{"and", terms}};
        }
      },
      p.node);
}

inline void highlight_units(Json& node, const Json& test) {
  if (node.is_object()) {
    if (node.contains("mark")) {
      node["encoding"]["opacity"] = Json{{"condition", {{"test", test}, {"value", kEmphasisOpacity}}},
                                         {"value", kDeemphasisOpacity}};
    }
    for (auto& [k, v] : node.items()) {
      if (k == "data" || k == "encoding") continue;
      highlight_units(v, test);
    }
  } else if (node.is_array()) {
    for (auto& v : node) highlight_units(v, test);
  }
}

}  // namespace detail

// Matching marks keep full opacity, the rest fade. Only encoding conditions
// change. A true predicate yields a condition that holds for every row.
inline Json apply_highlight(Json doc, const Predicate& predicate, const Dataset& data) {
  check_predicate(predicate, data);
  const Json test = detail::lower_test(predicate, data);
  detail::highlight_units(doc, test);
  return doc;
}

}  // namespace mmr
