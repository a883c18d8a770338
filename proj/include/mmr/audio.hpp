#pragma once

// Sonification: traversal linearization, tone/speech scheduling, playback
// orders, and PCM rendering of schedules.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mmr/dataset.hpp"
#include "mmr/defaults.hpp"
#include "mmr/predicate.hpp"
#include "mmr/scale.hpp"
#include "mmr/spec.hpp"
#include "mmr/wav.hpp"

namespace mmr {

inline constexpr double kToneSeconds = 0.2;

// The ordered values (or bins) one traversal step iterates over. Domains
// come from the whole dataset so filtering never reorders or re-bins them.
struct StepDomain {
  TraversalStep step;
  Column column;
  bool binned = false;
  std::vector<Value> values;
  std::vector<scale::Interval> bins;

  std::size_t size() const { return binned ? bins.size() : values.size(); }

  std::optional<std::size_t> locate(const Value& v) const {
    if (is_null(v)) return std::nullopt;
    if (binned) {
      if (!std::holds_alternative<double>(v)) return std::nullopt;
      const double d = std::get<double>(v);
      for (std::size_t i = 0; i < bins.size(); ++i) {
        if (bins[i].contains(d)) return i;
      }
      return std::nullopt;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == v) return i;
    }
    return std::nullopt;
  }

  StepPosition position(std::size_t i) const {
    StepPosition p;
    p.field = step.field;
    if (binned) {
      p.bin = std::make_pair(wire_value(bins[i].lo, column), wire_value(bins[i].hi, column));
      p.bin_closed = bins[i].closed;
    } else {
      p.value = wire_value(values[i], column);
    }
    return p;
  }

  Predicate constraint(std::size_t i) const { return from_audio_position({position(i)}); }

  std::string label(std::size_t i) const {
    if (binned) return display(bins[i].lo, column) + " to " + display(bins[i].hi, column);
    return display(values[i], column);
  }
};

inline StepDomain step_domain(const TraversalStep& step, const Dataset& data) {
  StepDomain d;
  d.step = step;
  d.column = data.column(step.field);
  const std::size_t col = data.require_column(step.field);
  const MeasureType type = d.column.type.value_or(MeasureType::nominal);
  d.binned = step.bin && is_continuous(type);
  std::vector<Value> seen_order;
  std::set<Value> seen;
  for (const auto& row : data.rows()) {
    const Value& v = row[col];
    if (!is_null(v) && seen.insert(v).second) seen_order.push_back(v);
  }
  if (d.binned) {
    if (seen_order.empty()) return d;
    double lo = std::get<double>(seen_order.front()), hi = lo;
    for (const auto& v : seen_order) {
      lo = std::min(lo, std::get<double>(v));
      hi = std::max(hi, std::get<double>(v));
    }
    const auto count = static_cast<std::size_t>(step.bin_count.value_or(kDefaultTraversalBins));
    d.bins = type == MeasureType::temporal ? scale::temporal_bins(lo, hi, count, scale::BinMode::at_most)
                                           : scale::nice_bins(lo, hi, count);
  } else if (is_continuous(type)) {
    d.values.assign(seen.begin(), seen.end());  // ascending
  } else {
    d.values = std::move(seen_order);  // first appearance
  }
  return d;
}

struct KeyTuple {
  std::vector<std::size_t> index;  // position within each step's domain
  std::vector<std::size_t> rows;

  bool operator==(const KeyTuple&) const = default;
};

struct Linearization {
  std::vector<StepDomain> domains;
  std::vector<KeyTuple> tuples;

  std::vector<StepPosition> positions(std::size_t t) const {
    std::vector<StepPosition> out;
    for (std::size_t s = 0; s < domains.size(); ++s) out.push_back(domains[s].position(tuples[t].index[s]));
    return out;
  }
  Predicate constraint(std::size_t t) const { return from_audio_position(positions(t)); }
};

namespace detail {

inline Linearization linearize_rows(const std::vector<TraversalStep>& traversal, const Dataset& data,
                                    const Predicate& filter, const std::vector<std::string>& required) {
  Linearization lin;
  for (const auto& s : traversal) lin.domains.push_back(step_domain(s, data));
  std::vector<std::size_t> cols;
  for (const auto& s : traversal) cols.push_back(data.require_column(s.field));
  std::vector<std::size_t> req;
  for (const auto& f : required) req.push_back(data.require_column(f));
  BoundPredicate bound(filter, data);

  std::map<std::vector<std::size_t>, std::vector<std::size_t>> groups;
  const auto& rows = data.rows();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!bound(rows[r])) continue;
    if (std::any_of(req.begin(), req.end(), [&](std::size_t c) { return is_null(rows[r][c]); })) continue;
    std::vector<std::size_t> idx;
    bool ok = true;
    for (std::size_t s = 0; s < cols.size() && ok; ++s) {
      auto i = lin.domains[s].locate(rows[r][cols[s]]);
      if (!i) ok = false;
      else idx.push_back(*i);
    }
    if (ok) groups[idx].push_back(r);
  }
  for (auto& [idx, rs] : groups) lin.tuples.push_back({idx, std::move(rs)});
  return lin;
}

}  // namespace detail

// Nested iteration order of the traversal over rows admitted by `filter`.
// Throws empty-after-filter when nothing remains.
inline Linearization linearize(const std::vector<TraversalStep>& traversal, const Dataset& data,
                               const Predicate& filter = always()) {
  auto lin = detail::linearize_rows(traversal, data, filter, {});
  if (lin.tuples.empty()) throw Error("empty-after-filter", "no rows remain for this traversal");
  return lin;
}

// ---------------------------------------------------------------------------
// Schedules

struct ToneEvent {
  double start = 0.0;
  double duration = 0.0;
  double frequency = 0.0;
  double value = 0.0;  // the encoded (aggregated) data value
  Predicate source;

  bool operator==(const ToneEvent&) const = default;
};

struct SpeechEvent {
  double start = 0.0;
  std::string text;

  bool operator==(const SpeechEvent&) const = default;
};

using AudioEvent = std::variant<ToneEvent, SpeechEvent>;

struct AudioSchedule {
  std::string unit_id;
  std::string order;
  std::vector<AudioEvent> events;
  double total_duration = 0.0;

  std::size_t tone_count() const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(),
                                                  [](const AudioEvent& e) { return std::holds_alternative<ToneEvent>(e); }));
  }
  double tone_time() const {
    double t = 0.0;
    for (const auto& e : events) {
      if (const auto* tone = std::get_if<ToneEvent>(&e)) t += tone->duration;
    }
    return t;
  }

  bool operator==(const AudioSchedule&) const = default;
};

struct ScheduleOptions {
  double rate = 1.0;
  bool ticks = true;
  Predicate filter;
};

inline double aggregate_values(const std::vector<double>& xs, Aggregate agg) {
  if (agg == Aggregate::count) return static_cast<double>(xs.size());
  if (xs.empty()) return 0.0;
  switch (agg) {
    case Aggregate::sum: {
      double s = 0;
      for (double x : xs) s += x;
      return s;
    }
    case Aggregate::min: return *std::min_element(xs.begin(), xs.end());
    case Aggregate::max: return *std::max_element(xs.begin(), xs.end());
    default: {
      double s = 0;
      for (double x : xs) s += x;
      return s / static_cast<double>(xs.size());
    }
  }
}

// Spoken tick values for a continuous step: the rendered axis ticks when a
// visual x/y encodes the field, otherwise a denser key-domain tick set.
inline std::vector<double> step_ticks(const StepDomain& d, const Spec& spec, const Dataset& data) {
  const std::size_t col = data.require_column(d.step.field);
  double lo = 0, hi = 0;
  bool any = false;
  for (const auto& row : data.rows()) {
    if (!std::holds_alternative<double>(row[col])) continue;
    const double v = std::get<double>(row[col]);
    if (!any) lo = hi = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    any = true;
  }
  if (!any) return {};
  bool on_axis = false;
  for (const auto& u : spec.visual_units) {
    for (const auto& e : u.encoding) {
      if (e.field == d.step.field && (e.channel == Channel::x || e.channel == Channel::y)) on_axis = true;
    }
  }
  const bool temporal = d.column.type == MeasureType::temporal;
  if (temporal) return scale::time_ticks(lo, hi, on_axis ? scale::kAxisTickCount : scale::kKeyTickCount);
  if (on_axis) return scale::quantitative_axis_ticks(lo, hi);
  return scale::ticks(lo, hi, scale::kKeyTickCount);
}

inline std::string describe_order(const std::vector<TraversalStep>& traversal) {
  std::string out = "by";
  for (std::size_t i = 0; i < traversal.size(); ++i) out += (i == 0 ? " " : ", then ") + traversal[i].field;
  return out;
}

inline AudioSchedule schedule(const AudioUnit& unit, const Spec& spec, const Dataset& data,
                              const ScheduleOptions& options = {}) {
  if (!(options.rate > 0)) throw Error("invalid-rate", "playback rate must be positive");
  const auto* pitch = find_encoding(unit.encoding, Channel::pitch);
  if (!pitch) throw Error("missing-pitch-encoding", "audio unit '" + unit.id + "' has no pitch encoding");
  if (unit.traversal.empty()) throw Error("empty-traversal", "audio unit '" + unit.id + "' has no traversal");
  check_predicate(options.filter, data);

  const Transform t = effective_transform(spec, *pitch);
  const Aggregate agg = t.aggregate.value_or(Aggregate::mean);
  const std::size_t pitch_col = data.require_column(pitch->field);
  const std::vector<std::string> required =
      agg == Aggregate::count ? std::vector<std::string>{} : std::vector<std::string>{pitch->field};

  auto values_of = [&](const Linearization& lin) {
    std::vector<double> out;
    for (const auto& tup : lin.tuples) {
      std::vector<double> xs;
      for (auto r : tup.rows) {
        if (const auto* d = std::get_if<double>(&data.rows()[r][pitch_col])) xs.push_back(*d);
      }
      out.push_back(aggregate_values(xs, agg));
    }
    return out;
  };

  AudioSchedule out;
  out.unit_id = unit.id;
  out.order = describe_order(unit.traversal);

  const auto full = detail::linearize_rows(unit.traversal, data, always(), required);
  const auto full_values = values_of(full);
  scale::FrequencyScale freq;
  if (!full_values.empty()) {
    freq.domain_min = *std::min_element(full_values.begin(), full_values.end());
    freq.domain_max = *std::max_element(full_values.begin(), full_values.end());
  }

  const auto lin = options.filter.is_true() ? full : detail::linearize_rows(unit.traversal, data, options.filter, required);
  if (lin.tuples.empty()) return out;  // silent
  const auto vals = options.filter.is_true() ? full_values : values_of(lin);

  const double dur = kToneSeconds / options.rate;
  const std::size_t last = lin.domains.size() - 1;
  const StepDomain& inner = lin.domains[last];
  const bool inner_continuous = !inner.binned && is_continuous(inner.column.type.value_or(MeasureType::nominal));
  const auto tick_values = options.ticks && inner_continuous ? step_ticks(inner, spec, data) : std::vector<double>{};

  std::size_t tick_cursor = 0;
  const std::vector<std::size_t>* prev = nullptr;
  for (std::size_t k = 0; k < lin.tuples.size(); ++k) {
    const auto& idx = lin.tuples[k].index;
    const double start = static_cast<double>(k) * dur;
    bool outer_changed = prev == nullptr;
    for (std::size_t s = 0; s < last; ++s) {
      const bool changed = outer_changed || (*prev)[s] != idx[s];
      if (changed) {
        outer_changed = true;
        if (options.ticks) out.events.push_back(SpeechEvent{start, lin.domains[s].label(idx[s])});
      }
    }
    if (outer_changed) tick_cursor = 0;
    if (options.ticks) {
      if (!inner_continuous) {
        out.events.push_back(SpeechEvent{start, inner.label(idx[last])});
      } else {
        const double v = std::get<double>(inner.values[idx[last]]);
        // Ticks skipped over without a tone of their own are not spoken.
        std::optional<double> passed;
        while (tick_cursor < tick_values.size() && tick_values[tick_cursor] <= v) passed = tick_values[tick_cursor++];
        if (passed) out.events.push_back(SpeechEvent{start, display(*passed, inner.column)});
      }
    }
    out.events.push_back(ToneEvent{start, dur, freq(vals[k]), vals[k], conjoin(lin.constraint(k), options.filter)});
    prev = &idx;
  }
  out.total_duration = static_cast<double>(lin.tuples.size()) * dur;
  return out;
}

inline std::vector<AudioSchedule> schedule_all(const Spec& spec, const Dataset& data, const ScheduleOptions& options = {}) {
  std::vector<AudioSchedule> out;
  for (const auto& id : spec.composition.audio.units) {
    const auto* u = spec.audio_unit(id);
    if (u && find_encoding(u->encoding, Channel::pitch)) out.push_back(schedule(*u, spec, data, options));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Playback orders

struct PlaybackOrder {
  std::string descriptor;
  std::vector<StepPosition> fixed;
  std::vector<TraversalStep> traversal;
};

// The traversal's own order, plus one order per selected step that fixes
// that step's current value and iterates the remaining steps.
inline std::vector<PlaybackOrder> enumerate_playback_orders(const AudioUnit& unit, const Dataset& data,
                                                            const std::vector<StepPosition>& selection = {}) {
  std::vector<PlaybackOrder> out;
  out.push_back({describe_order(unit.traversal), {}, unit.traversal});
  if (unit.traversal.size() < 2) return out;
  for (std::size_t i = 0; i < unit.traversal.size(); ++i) {
    const auto& step = unit.traversal[i];
    auto sel = std::find_if(selection.begin(), selection.end(), [&](const StepPosition& p) { return p.field == step.field; });
    if (sel == selection.end() || (!sel->value && !sel->bin)) continue;
    const Column& column = data.column(step.field);
    std::string label;
    if (sel->bin) {
      label = display(coerce_to_column(sel->bin->first, column), column) + " to " +
              display(coerce_to_column(sel->bin->second, column), column);
    } else {
      label = display(coerce_to_column(*sel->value, column), column);
    }
    PlaybackOrder o;
    o.fixed = {*sel};
    std::string rest;
    for (std::size_t j = 0; j < unit.traversal.size(); ++j) {
      if (j == i) continue;
      o.traversal.push_back(unit.traversal[j]);
      rest += (rest.empty() ? "" : ", then ") + unit.traversal[j].field;
    }
    o.descriptor = label + " by " + rest;
    out.push_back(std::move(o));
  }
  return out;
}

inline AudioSchedule schedule_order(const AudioUnit& unit, const Spec& spec, const Dataset& data,
                                    const PlaybackOrder& order, ScheduleOptions options = {}) {
  AudioUnit reordered = unit;
  reordered.traversal = order.traversal;
  options.filter = conjoin(options.filter, from_audio_position(order.fixed));
  auto s = schedule(reordered, spec, data, options);
  s.order = order.descriptor;
  return s;
}

// ---------------------------------------------------------------------------
// Rendering

struct WavFile {
  std::string name;
  std::vector<std::string> units;
  std::string bytes;
  Json cues = Json::array();
};

inline std::vector<double> synthesize(const AudioSchedule& s, int sample_rate) {
  if (sample_rate <= 0) throw Error("invalid-sample-rate", "sample rate must be positive");
  std::vector<double> buf(wav::frame_at(s.total_duration, sample_rate), 0.0);
  for (const auto& e : s.events) {
    if (const auto* t = std::get_if<ToneEvent>(&e)) wav::add_tone(buf, t->start, t->duration, t->frequency, sample_rate);
  }
  return buf;
}

inline Json cue_json(const std::vector<const AudioSchedule*>& schedules) {
  std::vector<std::pair<double, std::string>> cues;
  for (const auto* s : schedules) {
    for (const auto& e : s->events) {
      if (const auto* sp = std::get_if<SpeechEvent>(&e)) cues.emplace_back(sp->start, sp->text);
    }
  }
  std::stable_sort(cues.begin(), cues.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Json out = Json::array();
  for (const auto& [t, text] : cues) out.push_back({{"time_s", t}, {"text", text}});
  return out;
}

// Layered units mix into one file (scaled by 1/n, clipped); concatenated
// units each get their own file. Speech cues go to the sidecar, not audio.
inline std::vector<WavFile> render_wav(const std::vector<AudioSchedule>& schedules, const Composition& composition,
                                       int sample_rate = wav::kDefaultSampleRate) {
  if (sample_rate <= 0) throw Error("invalid-sample-rate", "sample rate must be positive");
  std::vector<WavFile> out;
  if (composition.op == CompositionOp::layer && schedules.size() > 1) {
    std::vector<std::vector<double>> tracks;
    std::size_t n = 0;
    WavFile f;
    f.name = "audio.wav";
    std::vector<const AudioSchedule*> ptrs;
    for (const auto& s : schedules) {
      tracks.push_back(synthesize(s, sample_rate));
      n = std::max(n, tracks.back().size());
      f.units.push_back(s.unit_id);
      ptrs.push_back(&s);
    }
    std::vector<double> mix(n, 0.0);
    const double scale = 1.0 / static_cast<double>(tracks.size());
    for (const auto& t : tracks) {
      for (std::size_t i = 0; i < t.size(); ++i) mix[i] += t[i] * scale;
    }
    for (auto& v : mix) v = std::clamp(v, -1.0, 1.0);
    f.bytes = wav::encode(mix, sample_rate);
    f.cues = cue_json(ptrs);
    out.push_back(std::move(f));
    return out;
  }
  for (const auto& s : schedules) {
    WavFile f;
    f.name = s.unit_id + ".wav";
    f.units = {s.unit_id};
    f.bytes = wav::encode(synthesize(s, sample_rate), sample_rate);
    f.cues = cue_json({&s});
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline Json to_json(const AudioSchedule& s) {
  Json events = Json::array();
  for (const auto& e : s.events) {
    if (const auto* t = std::get_if<ToneEvent>(&e)) {
      events.push_back({{"type", "tone"},
                        {"start", t->start},
                        {"duration", t->duration},
                        {"frequency", t->frequency},
                        {"value", t->value},
                        {"predicate", to_json(t->source)}});
    } else {
      const auto& sp = std::get<SpeechEvent>(e);
      events.push_back({{"type", "speech"}, {"start", sp.start}, {"text", sp.text}});
    }
  }
  return Json{{"unit", s.unit_id}, {"order", s.order}, {"total_duration", s.total_duration}, {"events", events}};
}

inline Json to_json(const std::vector<AudioSchedule>& schedules, const Composition& composition) {
  Json units = Json::array();
  for (const auto& s : schedules) units.push_back(to_json(s));
  return Json{{"composition", to_string(composition.op)}, {"schedules", units}};
}

inline Json to_json(const PlaybackOrder& o) {
  Json fixed = Json::array();
  for (const auto& p : o.fixed) {
    Json j{{"field", p.field}};
    if (p.value) j["value"] = to_json(*p.value);
    if (p.bin) j["bin"] = Json::array({to_json(p.bin->first), to_json(p.bin->second)});
    fixed.push_back(j);
  }
  Json steps = Json::array();
  for (const auto& s : o.traversal) steps.push_back(s.field);
  return Json{{"descriptor", o.descriptor}, {"fixed", fixed}, {"traversal", steps}};
}

}  // namespace mmr
