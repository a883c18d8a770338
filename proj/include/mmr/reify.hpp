#pragma once

// Turns a sync message into the effect each other view applies: visual
// highlights, audio filters its domain, text zooms to the selection.

#include <map>
#include <optional>
#include <set>
#include <variant>

#include "mmr/audio.hpp"
#include "mmr/text.hpp"
#include "mmr/visual.hpp"

namespace mmr {

// Rows with no value in a continuous field on visual x/y or audio pitch
// cannot be placed in the chart or given a tone, so no view shows them.
inline Dataset drop_invalid_rows(const Spec& spec, const Dataset& data) {
  std::set<std::size_t> cols;
  auto note = [&](const UnitEncoding& e) {
    if (auto c = data.column_index(e.field); c && is_continuous(data.columns()[*c].type.value_or(MeasureType::nominal))) {
      cols.insert(*c);
    }
  };
  for (const auto& u : spec.visual_units) {
    for (const auto& e : u.encoding) {
      if (e.channel == Channel::x || e.channel == Channel::y) note(e);
    }
  }
  for (const auto& u : spec.audio_units) {
    for (const auto& e : u.encoding) {
      if (e.channel == Channel::pitch) note(e);
    }
  }
  if (cols.empty()) return data;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    const auto& row = data.rows()[r];
    if (std::none_of(cols.begin(), cols.end(), [&](std::size_t c) { return is_null(row[c]); })) keep.push_back(r);
  }
  return keep.size() == data.row_count() ? data : data.keep_rows(keep);
}

// The compiled, unselected state of all three views.
struct ViewerContext {
  Spec spec;
  Dataset data;
  std::optional<Json> visual;  // absent without visual units
  TextTree tree;
  ScheduleOptions audio;       // filter is ignored; reify supplies it

  static ViewerContext make(const Spec& spec, const Dataset& all, ScheduleOptions audio = {}) {
    const Dataset data = drop_invalid_rows(spec, all);
    ViewerContext ctx{spec, data, std::nullopt, build_tree(spec, data), audio};
    if (!spec.visual_units.empty()) ctx.visual = compile_visual(spec, data);
    ctx.audio.filter = always();
    return ctx;
  }
};

struct NoEffect {
  bool operator==(const NoEffect&) const = default;
};

struct HighlightEffect {
  Json doc;
  bool operator==(const HighlightEffect&) const = default;
};

struct AudioFilterEffect {
  Predicate filter;
  std::vector<AudioSchedule> schedules;
  bool operator==(const AudioFilterEffect&) const = default;
};

struct TextRescopeEffect {
  TextTree tree;
  bool operator==(const TextRescopeEffect& o) const { return tree.root == o.tree.root; }
};

using ReifiedEffect = std::variant<NoEffect, HighlightEffect, AudioFilterEffect, TextRescopeEffect>;

inline ReifiedEffect reify(const ViewerContext& ctx, const SyncMessage& message, ViewKind target) {
  if (target == message.source) return NoEffect{};
  check_predicate(message.predicate, ctx.data);
  switch (target) {
    case ViewKind::visual:
      if (!ctx.visual) return NoEffect{};
      return HighlightEffect{apply_highlight(*ctx.visual, message.predicate, ctx.data)};
    case ViewKind::audio: {
      ScheduleOptions options = ctx.audio;
      options.filter = message.predicate;
      return AudioFilterEffect{message.predicate, schedule_all(ctx.spec, ctx.data, options)};
    }
    case ViewKind::text:
      return TextRescopeEffect{rescope_tree(ctx.tree, message.predicate, ctx.data)};
  }
  return NoEffect{};
}

inline std::map<ViewKind, ReifiedEffect> reify_all(const ViewerContext& ctx, const SyncMessage& message) {
  std::map<ViewKind, ReifiedEffect> out;
  for (auto target : {ViewKind::visual, ViewKind::text, ViewKind::audio}) out[target] = reify(ctx, message, target);
  return out;
}

inline Json to_json(const ReifiedEffect& effect) {
  return std::visit(
      [](const auto& e) -> Json {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, NoEffect>) {
          return Json{{"kind", "none"}};
        } else if constexpr (std::is_same_v<T, HighlightEffect>) {
          return Json{{"kind", "highlight"}, {"doc", e.doc}};
        } else if constexpr (std::is_same_v<T, AudioFilterEffect>) {
          Json schedules = Json::array();
          for (const auto& s : e.schedules) schedules.push_back(to_json(s));
          return Json{{"kind", "filter"}, {"predicate", to_json(e.filter)}, {"schedules", schedules}};
        } else {
          return Json{{"kind", "rescope"}, {"tree", to_json(e.tree)}};
        }
      },
      effect);
}

}  // namespace mmr
