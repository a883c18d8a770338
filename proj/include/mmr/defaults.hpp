#pragma once

// Default specifications from a dataset's key and field typings. Six rules,
// tried in order; the first whose key and value type multisets match wins.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mmr/dataset.hpp"
#include "mmr/spec.hpp"

namespace mmr {

struct KeyFieldInfo {
  MeasureType type = MeasureType::nominal;
  std::size_t categories = 0;  // distinct values in the dataset
};

inline constexpr std::size_t kFewCategories = 5;
inline constexpr int kDefaultTraversalBins = 10;

namespace detail {

// Ordinal behaves as nominal for the heuristics.
inline char type_letter(MeasureType t) {
  switch (t) {
    case MeasureType::quantitative: return 'Q';
    case MeasureType::temporal: return 'T';
    default: return 'N';
  }
}

template <typename Range, typename Proj>
std::string letters(const Range& r, Proj proj) {
  std::string s;
  for (const auto& x : r) s.push_back(type_letter(proj(x)));
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace detail

// Rule number 1-6, or nullopt when nothing matches.
inline std::optional<int> match_rule(const std::vector<KeyFieldInfo>& key,
                                     const std::vector<MeasureType>& values) {
  const std::string k = detail::letters(key, [](const KeyFieldInfo& f) { return f.type; });
  const std::string v = detail::letters(values, [](MeasureType t) { return t; });
  if (k == "NT" && v == "Q") {
    const auto n = std::find_if(key.begin(), key.end(), [](const KeyFieldInfo& f) { return is_discrete(f.type); });
    return n->categories <= kFewCategories ? 1 : 2;
  }
  if (k.empty() && v == "NQQ") return 3;
  if (k == "T" && v == "QQ") return 4;
  if (k == "NNT" && v == "Q") return 5;
  if (k == "NT" && v == "QQ") return 6;
  return std::nullopt;
}

// Field definitions for selected columns, in dataset column order.
inline std::vector<FieldDef> field_defs(const Dataset& data, const std::vector<std::string>& selected) {
  std::vector<FieldDef> out;
  for (const auto& c : data.columns()) {
    if (std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    out.push_back({c.name, c.type.value_or(MeasureType::nominal), {}, {}});
  }
  for (const auto& s : selected) data.require_column(s);
  return out;
}

namespace detail {

struct SpecBuilder {
  Spec spec;

  VisualUnit& visual(Mark mark) {
    spec.visual_units.push_back({"visual_" + std::to_string(spec.visual_units.size()), mark, {}});
    return spec.visual_units.back();
  }

  AudioUnit& audio() {
    spec.audio_units.push_back({"audio_" + std::to_string(spec.audio_units.size()), {}, {}});
    return spec.audio_units.back();
  }

  static void enc(VisualUnit& u, Channel c, const std::string& field) { u.encoding.push_back({c, field, std::nullopt}); }

  static void pitch(AudioUnit& u, const std::string& field, std::optional<Aggregate> agg = std::nullopt) {
    std::optional<Transform> override_transform;
    if (agg) override_transform = Transform{agg, false, std::nullopt};
    u.encoding.push_back({Channel::pitch, field, override_transform});
  }

  static void step(AudioUnit& u, const std::string& field, bool bin = false) {
    u.traversal.push_back({field, bin, std::nullopt});
  }

  Spec finish() {
    spec.composition.visual.op = CompositionOp::layer;
    spec.composition.audio.op = CompositionOp::concat;
    sync_composition(spec);
    rebuild_refs(spec);
    return spec;
  }
};

}  // namespace detail

inline Spec generate_default(const std::vector<FieldDef>& fields, const std::vector<std::string>& key,
                             const Dataset& data) {
  detail::SpecBuilder b;
  for (const auto& f : fields) b.spec.fields.push_back({f.name, f.type, f.transform, {}});
  b.spec.key = key;

  auto type_of = [&](const std::string& name) {
    for (const auto& f : fields) {
      if (f.name == name) return f.type;
    }
    return MeasureType::nominal;
  };
  auto categories = [&](const std::string& name) {
    return data.column_index(name) ? distinct_count(data, name) : 0;
  };

  std::vector<KeyFieldInfo> key_info;
  std::vector<std::string> t_keys, n_keys;
  for (const auto& k : key) {
    const auto t = type_of(k);
    key_info.push_back({t, categories(k)});
    (t == MeasureType::temporal ? t_keys : n_keys).push_back(k);
  }
  std::vector<MeasureType> value_types;
  std::vector<std::string> q_values, n_values;
  for (const auto& f : fields) {
    if (std::find(key.begin(), key.end(), f.name) != key.end()) continue;
    value_types.push_back(f.type);
    if (f.type == MeasureType::quantitative) q_values.push_back(f.name);
    if (is_discrete(f.type)) n_values.push_back(f.name);
  }

  const auto rule = match_rule(key_info, value_types);
  if (!rule) return b.finish();

  // Nominal key fields by ascending cardinality: the coarser one facets.
  std::stable_sort(n_keys.begin(), n_keys.end(),
                   [&](const std::string& a, const std::string& c) { return categories(a) < categories(c); });

  using B = detail::SpecBuilder;
  switch (*rule) {
    case 1: {
      auto& v = b.visual(Mark::line);
      B::enc(v, Channel::x, t_keys[0]);
      B::enc(v, Channel::y, q_values[0]);
      B::enc(v, Channel::color, n_keys[0]);
      auto& a = b.audio();
      B::pitch(a, q_values[0]);
      B::step(a, n_keys[0]);
      B::step(a, t_keys[0]);
      break;
    }
    case 2: {
      auto& v = b.visual(Mark::point);
      B::enc(v, Channel::x, t_keys[0]);
      B::enc(v, Channel::y, n_keys[0]);
      B::enc(v, Channel::color, n_keys[0]);
      B::enc(v, Channel::size, q_values[0]);
      auto& a = b.audio();
      B::pitch(a, q_values[0]);
      B::step(a, n_keys[0]);
      B::step(a, t_keys[0]);
      break;
    }
    case 3: {
      auto& v = b.visual(Mark::point);
      B::enc(v, Channel::x, q_values[0]);
      B::enc(v, Channel::y, q_values[1]);
      B::enc(v, Channel::color, n_values[0]);
      auto& a0 = b.audio();
      B::pitch(a0, q_values[0], Aggregate::mean);
      B::step(a0, q_values[1], true);
      auto& a1 = b.audio();
      B::pitch(a1, q_values[1], Aggregate::mean);
      B::step(a1, q_values[0], true);
      break;
    }
    case 4: {
      auto& v = b.visual(Mark::line);
      B::enc(v, Channel::x, q_values[0]);
      B::enc(v, Channel::y, q_values[1]);
      B::enc(v, Channel::order, key[0]);
      auto& a0 = b.audio();
      B::pitch(a0, q_values[0]);
      B::step(a0, key[0]);
      auto& a1 = b.audio();
      B::pitch(a1, q_values[1]);
      B::step(a1, key[0]);
      break;
    }
    case 5: {
      auto& v = b.visual(Mark::point);
      B::enc(v, Channel::x, q_values[0]);
      B::enc(v, Channel::y, n_keys[1]);
      B::enc(v, Channel::color, t_keys[0]);
      B::enc(v, Channel::facet, n_keys[0]);
      auto& a = b.audio();
      B::pitch(a, q_values[0]);
      B::step(a, n_keys[0]);
      B::step(a, n_keys[1]);
      B::step(a, t_keys[0]);
      break;
    }
    case 6: {
      auto& v = b.visual(Mark::line);
      B::enc(v, Channel::x, q_values[0]);
      B::enc(v, Channel::y, q_values[1]);
      B::enc(v, Channel::facet, n_keys[0]);
      B::enc(v, Channel::color, n_keys[0]);
      B::enc(v, Channel::order, t_keys[0]);
      for (int i = 0; i < 2; ++i) {
        auto& a = b.audio();
        B::pitch(a, q_values[static_cast<std::size_t>(i)]);
        B::step(a, n_keys[0]);
        B::step(a, t_keys[0]);
      }
      break;
    }
    default: break;
  }
  return b.finish();
}

// Infers the key over the selection and generates defaults for it.
inline Spec default_spec(const Dataset& data, const std::vector<std::string>& selected) {
  const auto fields = field_defs(data, selected);
  std::vector<std::string> ordered;
  for (const auto& f : fields) ordered.push_back(f.name);
  return generate_default(fields, infer_key(data, ordered), data);
}

inline Spec default_spec(const Dataset& data) {
  std::vector<std::string> all;
  for (const auto& c : data.columns()) all.push_back(c.name);
  return default_spec(data, all);
}

}  // namespace mmr
