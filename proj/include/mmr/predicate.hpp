#pragma once

// Row-selection predicates: the currency every modality emits and reifies.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mmr/dataset.hpp"
#include "mmr/error.hpp"
#include "mmr/value.hpp"

namespace mmr {

struct Predicate;

struct TruePredicate {
  bool operator==(const TruePredicate&) const = default;
};

struct FieldEqual {
  std::string field;
  Value value;
  bool operator==(const FieldEqual&) const = default;
};

// lo <= v < hi, or lo <= v <= hi when closed (the top bin of a binning).
struct FieldRange {
  std::string field;
  Value lo;
  Value hi;
  bool closed = false;
  bool operator==(const FieldRange&) const = default;
};

struct FieldOneOf {
  std::string field;
  std::vector<Value> values;
  bool operator==(const FieldOneOf&) const = default;
};

struct AndPredicate {
  std::vector<Predicate> terms;
  bool operator==(const AndPredicate&) const;
};

struct Predicate {
  std::variant<TruePredicate, FieldEqual, FieldRange, FieldOneOf, AndPredicate> node;

  Predicate() = default;
  template <typename T>
    requires std::is_constructible_v<decltype(node), T&&> &&
             (!std::is_same_v<std::decay_t<T>, Predicate>)
  Predicate(T&& n) : node(std::forward<T>(n)) {}  // NOLINT(google-explicit-constructor)

  bool is_true() const {
    if (std::holds_alternative<TruePredicate>(node)) return true;
    if (const auto* a = std::get_if<AndPredicate>(&node)) {
      return std::all_of(a->terms.begin(), a->terms.end(), [](const Predicate& p) { return p.is_true(); });
    }
    return false;
  }

  bool operator==(const Predicate&) const = default;
};

inline bool AndPredicate::operator==(const AndPredicate& o) const { return terms == o.terms; }

inline Predicate always() { return TruePredicate{}; }

inline Predicate equal(std::string field, Value v) { return FieldEqual{std::move(field), std::move(v)}; }

inline Predicate in_range(std::string field, Value lo, Value hi, bool closed = false) {
  return FieldRange{std::move(field), std::move(lo), std::move(hi), closed};
}

// Flattening conjunction: nested Ands are spliced, True terms and repeated
// terms dropped.
inline Predicate conjoin(const std::vector<Predicate>& terms) {
  std::vector<Predicate> flat;
  auto add = [&](const Predicate& p) {
    if (p.is_true()) return;
    if (std::find(flat.begin(), flat.end(), p) == flat.end()) flat.push_back(p);
  };
  for (const auto& t : terms) {
    if (const auto* a = std::get_if<AndPredicate>(&t.node)) {
      for (const auto& inner : a->terms) add(inner);
    } else {
      add(t);
    }
  }
  if (flat.empty()) return always();
  if (flat.size() == 1) return flat.front();
  return AndPredicate{std::move(flat)};
}

inline Predicate conjoin(const Predicate& a, const Predicate& b) { return conjoin(std::vector<Predicate>{a, b}); }

// Fields mentioned anywhere in the predicate.
inline void collect_fields(const Predicate& p, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AndPredicate>) {
          for (const auto& t : n.terms) collect_fields(t, out);
        } else if constexpr (!std::is_same_v<T, TruePredicate>) {
          if (std::find(out.begin(), out.end(), n.field) == out.end()) out.push_back(n.field);
        }
      },
      p.node);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline bool value_less(const Value& a, const Value& b) {
  if (std::holds_alternative<double>(a) && std::holds_alternative<double>(b)) {
    return std::get<double>(a) < std::get<double>(b);
  }
  return a < b;
}

}  // namespace detail

// A predicate resolved against one dataset's columns: field lookups and value
// coercions happen once, so per-row evaluation is cheap.
class BoundPredicate {
 public:
  BoundPredicate(const Predicate& p, const std::vector<Column>& columns) : root_(bind(p, columns)) {}
  BoundPredicate(const Predicate& p, const Dataset& data) : BoundPredicate(p, data.columns()) {}

  bool operator()(const Row& row) const { return eval(root_, row); }

 private:
  struct Term {
    enum class Kind { all, equal, range, one_of, conj } kind = Kind::all;
    std::size_t col = 0;
    Value a, b;
    bool closed = false;
    std::vector<Value> set;
    std::vector<Term> children;
  };

  static std::size_t find(const std::vector<Column>& cols, const std::string& field) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i].name == field) return i;
    }
    throw Error("unknown-field", "predicate references unknown field '" + field + "'");
  }

  static Term bind(const Predicate& p, const std::vector<Column>& cols) {
    Term t;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, TruePredicate>) {
            t.kind = Term::Kind::all;
          } else if constexpr (std::is_same_v<T, FieldEqual>) {
            t.kind = Term::Kind::equal;
            t.col = find(cols, n.field);
            t.a = coerce_to_column(n.value, cols[t.col]);
          } else if constexpr (std::is_same_v<T, FieldRange>) {
            t.kind = Term::Kind::range;
            t.col = find(cols, n.field);
            t.a = coerce_to_column(n.lo, cols[t.col]);
            t.b = coerce_to_column(n.hi, cols[t.col]);
            t.closed = n.closed;
            if (is_null(t.a) || is_null(t.b) || !detail::value_less(t.a, t.b)) {
              throw Error("invalid-predicate", "range on '" + n.field + "' needs lo < hi");
            }
          } else if constexpr (std::is_same_v<T, FieldOneOf>) {
            t.kind = Term::Kind::one_of;
            t.col = find(cols, n.field);
            for (const auto& v : n.values) t.set.push_back(coerce_to_column(v, cols[t.col]));
          } else {
            t.kind = Term::Kind::conj;
            for (const auto& c : n.terms) t.children.push_back(bind(c, cols));
          }
        },
        p.node);
    return t;
  }

  static bool eval(const Term& t, const Row& row) {
    switch (t.kind) {
      case Term::Kind::all: return true;
      case Term::Kind::equal: return !is_null(row[t.col]) && row[t.col] == t.a;
      case Term::Kind::range: {
        const Value& v = row[t.col];
        if (is_null(v)) return false;
        if (detail::value_less(v, t.a)) return false;
        return t.closed ? !detail::value_less(t.b, v) : detail::value_less(v, t.b);
      }
      case Term::Kind::one_of:
        return !is_null(row[t.col]) && std::find(t.set.begin(), t.set.end(), row[t.col]) != t.set.end();
      case Term::Kind::conj:
        return std::all_of(t.children.begin(), t.children.end(), [&](const Term& c) { return eval(c, row); });
    }
    return false;
  }

  Term root_;
};

// True matches everything; And is conjunction; ranges are half-open unless
// closed; temporal values compare as instants. Throws unknown-field.
inline bool evaluate(const Predicate& p, const Row& row, const std::vector<Column>& columns) {
  return BoundPredicate(p, columns)(row);
}

inline std::vector<std::size_t> matching_rows(const Predicate& p, const Dataset& data) {
  BoundPredicate bound(p, data);
  std::vector<std::size_t> out;
  const auto& rows = data.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (bound(rows[i])) out.push_back(i);
  }
  return out;
}

inline std::size_t count_matching(const Predicate& p, const Dataset& data) {
  return matching_rows(p, data).size();
}

// ---------------------------------------------------------------------------
// Wire format: {field, equal} / {field, range[, inclusive]} / {field, oneOf} /
// {and: [...]}; the always-true predicate is `true`.

inline Json to_json(const Predicate& p) {
  return std::visit(
      [](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, TruePredicate>) {
          return Json(true);
        } else if constexpr (std::is_same_v<T, FieldEqual>) {
          return Json{{"field", n.field}, {"equal", to_json(n.value)}};
        } else if constexpr (std::is_same_v<T, FieldRange>) {
          Json j{{"field", n.field}, {"range", Json::array({to_json(n.lo), to_json(n.hi)})}};
          if (n.closed) j["inclusive"] = true;
          return j;
        } else if constexpr (std::is_same_v<T, FieldOneOf>) {
          Json vals = Json::array();
          for (const auto& v : n.values) vals.push_back(to_json(v));
          return Json{{"field", n.field}, {"oneOf", vals}};
        } else {
          Json terms = Json::array();
          for (const auto& t : n.terms) terms.push_back(to_json(t));
          return Json{{"and", terms}};
        }
      },
      p.node);
}

inline Predicate predicate_from_json(const Json& j) {
  auto bad = [&](const std::string& why) {
    return Error("malformed-predicate", why + ": " + j.dump());
  };
  if (j.is_boolean()) {
    if (!j.get<bool>()) throw bad("false is not a selection");
    return always();
  }
  if (!j.is_object()) throw bad("predicate must be an object or true");
  if (j.empty()) return always();
  if (j.contains("and")) {
    if (!j["and"].is_array() || j.size() != 1) throw bad("'and' must be the only key and hold an array");
    AndPredicate a;
    for (const auto& t : j["and"]) a.terms.push_back(predicate_from_json(t));
    if (a.terms.empty()) return always();
    return a;
  }
  if (!j.contains("field") || !j["field"].is_string()) throw bad("missing 'field'");
  const std::string field = j["field"].get<std::string>();
  if (j.contains("equal")) return FieldEqual{field, value_from_json(j["equal"])};
  if (j.contains("range")) {
    const auto& r = j["range"];
    if (!r.is_array() || r.size() != 2) throw bad("'range' must be [lo, hi]");
    bool closed = j.contains("inclusive") && j["inclusive"].is_boolean() && j["inclusive"].get<bool>();
    return FieldRange{field, value_from_json(r[0]), value_from_json(r[1]), closed};
  }
  if (j.contains("oneOf")) {
    if (!j["oneOf"].is_array()) throw bad("'oneOf' must be an array");
    FieldOneOf o{field, {}};
    for (const auto& v : j["oneOf"]) o.values.push_back(value_from_json(v));
    return o;
  }
  throw bad("expected one of equal/range/oneOf");
}

// Checks fields exist and ranges are ordered; throws on the first problem.
inline void check_predicate(const Predicate& p, const Dataset& data) { BoundPredicate(p, data); }

// ---------------------------------------------------------------------------
// Cross-modal messages

enum class ViewKind { visual, text, audio };

inline std::string_view to_string(ViewKind m) {
  switch (m) {
    case ViewKind::visual: return "visual";
    case ViewKind::text: return "text";
    case ViewKind::audio: return "audio";
  }
  return "text";
}

inline ViewKind view_kind_from_string(std::string_view s) {
  if (s == "visual") return ViewKind::visual;
  if (s == "text") return ViewKind::text;
  if (s == "audio") return ViewKind::audio;
  throw Error("malformed-message", "unknown modality '" + std::string(s) + "'");
}

struct SyncMessage {
  ViewKind source = ViewKind::text;
  Predicate predicate;
  std::optional<std::uint64_t> version;  // state version the sender observed
};

inline SyncMessage sync_message_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("source") || !j["source"].is_string() || !j.contains("predicate")) {
    throw Error("malformed-message", "selection needs 'source' and 'predicate'");
  }
  SyncMessage m;
  m.source = view_kind_from_string(j["source"].get<std::string>());
  m.predicate = predicate_from_json(j["predicate"]);
  if (j.contains("version")) {
    if (!j["version"].is_number_unsigned()) throw Error("malformed-message", "'version' must be unsigned");
    m.version = j["version"].get<std::uint64_t>();
  }
  return m;
}

inline Json to_json(const SyncMessage& m) {
  Json j{{"source", to_string(m.source)}, {"predicate", to_json(m.predicate)}};
  if (m.version) j["version"] = *m.version;
  return j;
}

// ---------------------------------------------------------------------------
// Audio playback position -> predicate

// The value (or bin) a paused audio unit currently holds for one traversal
// step. Unfixed steps carry neither.
struct StepPosition {
  std::string field;
  std::optional<Value> value;
  std::optional<std::pair<Value, Value>> bin;
  bool bin_closed = false;
};

inline Predicate from_audio_position(const std::vector<StepPosition>& state) {
  std::vector<Predicate> terms;
  for (const auto& s : state) {
    if (s.bin) {
      if (s.bin->first == s.bin->second) terms.push_back(FieldEqual{s.field, s.bin->first});
      else terms.push_back(FieldRange{s.field, s.bin->first, s.bin->second, s.bin_closed});
    } else if (s.value) {
      terms.push_back(FieldEqual{s.field, *s.value});
    }
  }
  return conjoin(terms);
}

}  // namespace mmr
