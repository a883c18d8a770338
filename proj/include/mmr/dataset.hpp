#pragma once

// Tabular data ingestion: CSV / JSON-record loading, measure-type inference,
// and composite-key (functional dependency) inference.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mmr/csv.hpp"
#include "mmr/error.hpp"
#include "mmr/temporal.hpp"
#include "mmr/value.hpp"

namespace mmr {

enum class DataFormat { csv, json_records };

struct Column {
  std::string name;
  std::optional<MeasureType> type;  // nullopt until typed
  TimeGrain grain = TimeGrain::day;  // meaningful for temporal columns only

  bool operator==(const Column&) const = default;
};

using Row = std::vector<Value>;

namespace detail {

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) return std::nullopt;
  return out;
}

inline bool raw_is_year(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return temporal::is_year_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return temporal::parse_year(*s).has_value();
  return false;
}

inline std::optional<ParsedInstant> raw_instant(const Value& v) {
  if (raw_is_year(v)) {
    const double y = std::holds_alternative<double>(v)
                         ? std::get<double>(v)
                         : static_cast<double>(*temporal::parse_year(std::get<std::string>(v)));
    return ParsedInstant{temporal::year_start(static_cast<int>(y)), TimeGrain::year};
  }
  if (const auto* s = std::get_if<std::string>(&v)) return temporal::parse_date(*s);
  return std::nullopt;
}

inline std::optional<double> raw_number(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* s = std::get_if<std::string>(&v)) return parse_number(*s);
  return std::nullopt;
}

inline Value typed_cell(const Value& raw, MeasureType type) {
  if (is_null(raw)) return raw;
  switch (type) {
    case MeasureType::quantitative: {
      auto n = raw_number(raw);
      return n ? Value{*n} : Value{};
    }
    case MeasureType::temporal: {
      if (const auto* d = std::get_if<double>(&raw); d && !temporal::is_year_number(*d)) {
        return *d;  // already epoch milliseconds
      }
      auto t = raw_instant(raw);
      return t ? Value{t->ms} : Value{};
    }
    case MeasureType::nominal:
    case MeasureType::ordinal:
      if (const auto* d = std::get_if<double>(&raw)) return number_label(*d);
      return raw;
  }
  return raw;
}

}  // namespace detail

// Immutable table. Copies share row storage.
class Dataset {
 public:
  Dataset() : raw_(std::make_shared<const std::vector<Row>>()), rows_(raw_) {}

  Dataset(std::vector<std::string> names, std::vector<Row> raw_rows) {
    for (auto& n : names) columns_.push_back(Column{std::move(n), std::nullopt, TimeGrain::day});
    for (const auto& r : raw_rows) {
      if (r.size() != columns_.size()) {
        throw Error("ragged-rows", "row arity does not match column count");
      }
    }
    raw_ = std::make_shared<const std::vector<Row>>(std::move(raw_rows));
    rows_ = raw_;
  }

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return *rows_; }
  const std::vector<Row>& raw_rows() const { return *raw_; }
  std::size_t row_count() const { return rows_->size(); }
  std::size_t column_count() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }

  std::optional<std::size_t> column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::size_t require_column(std::string_view name) const {
    auto idx = column_index(name);
    if (!idx) throw Error("unknown-field", "unknown field '" + std::string(name) + "'");
    return *idx;
  }

  const Column& column(std::string_view name) const { return columns_[require_column(name)]; }

  MeasureType type_of(std::string_view name) const {
    return column(name).type.value_or(MeasureType::nominal);
  }

  bool typed() const {
    return std::all_of(columns_.begin(), columns_.end(),
                       [](const Column& c) { return c.type.has_value(); });
  }

  // Re-derives typed cells from the raw cells for every column listed.
  Dataset with_types(const std::map<std::string, MeasureType>& types) const {
    Dataset out = *this;
    std::vector<std::optional<MeasureType>> target(columns_.size());
    bool changed = false;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      auto it = types.find(columns_[i].name);
      target[i] = it != types.end() ? std::optional<MeasureType>(it->second) : columns_[i].type;
      if (target[i] != columns_[i].type) changed = true;
    }
    if (!changed) return out;
    std::vector<Row> typed(*raw_);
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      out.columns_[c].type = target[c];
      if (!target[c]) continue;
      bool all_year = true, any_clock = false, any_value = false;
      for (std::size_t r = 0; r < typed.size(); ++r) {
        auto& row = typed[r];
        const Value& raw = (*raw_)[r][c];
        if (*target[c] == MeasureType::temporal && !is_null(raw)) {
          any_value = true;
          if (!detail::raw_is_year(raw)) all_year = false;
          if (const auto* s = std::get_if<std::string>(&raw)) {
            if (auto p = temporal::parse_date(*s); p && p->grain == TimeGrain::datetime) any_clock = true;
          }
        }
        row[c] = detail::typed_cell(raw, *target[c]);
      }
      if (*target[c] == MeasureType::temporal) {
        out.columns_[c].grain = (any_value && all_year) ? TimeGrain::year
                                : any_clock            ? TimeGrain::datetime
                                                       : TimeGrain::day;
      }
    }
    out.rows_ = std::make_shared<const std::vector<Row>>(std::move(typed));
    return out;
  }

  // The listed rows, in the order given, keeping raw and typed cells aligned.
  Dataset keep_rows(const std::vector<std::size_t>& indices) const {
    Dataset out = *this;
    std::vector<Row> raw, typed;
    raw.reserve(indices.size());
    typed.reserve(indices.size());
    for (auto i : indices) {
      raw.push_back((*raw_)[i]);
      typed.push_back((*rows_)[i]);
    }
    const bool shared = raw_ == rows_;
    out.raw_ = std::make_shared<const std::vector<Row>>(std::move(raw));
    out.rows_ = shared ? out.raw_ : std::make_shared<const std::vector<Row>>(std::move(typed));
    return out;
  }

  Dataset with_type(const std::string& name, MeasureType type) const {
    require_column(name);
    return with_types({{name, type}});
  }

  std::map<std::string, MeasureType> types() const {
    std::map<std::string, MeasureType> out;
    for (const auto& c : columns_) out[c.name] = c.type.value_or(MeasureType::nominal);
    return out;
  }

  bool operator==(const Dataset& other) const {
    return columns_ == other.columns_ && *raw_ == *other.raw_ && *rows_ == *other.rows_;
  }

 private:
  std::vector<Column> columns_;
  std::shared_ptr<const std::vector<Row>> raw_;
  std::shared_ptr<const std::vector<Row>> rows_;
};

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

inline Dataset load_csv(std::string_view bytes) {
  auto table = csv::parse(bytes);
  std::vector<Row> rows;
  rows.reserve(table.rows.size());
  for (auto& r : table.rows) {
    Row row;
    row.reserve(r.size());
    for (auto& cell : r) row.push_back(cell ? Value{std::move(*cell)} : Value{});
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(table.header), std::move(rows));
}

inline Dataset load_json_records(std::string_view bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed JSON", line_of(bytes, offset), offset);
  }
  if (!doc.is_array()) throw ParseError("expected an array of records", 1, 0);
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& rec : doc) {
    if (!rec.is_object()) throw ParseError("record is not an object", 1, 0);
    for (const auto& [k, v] : rec.items()) {
      if (v.is_object() || v.is_array()) {
        throw ParseError("nested value in field '" + k + "' (records must be flat)", 1, 0);
      }
      if (index.emplace(k, names.size()).second) names.push_back(k);
    }
  }
  std::vector<Row> rows;
  rows.reserve(doc.size());
  for (const auto& rec : doc) {
    Row row(names.size());
    for (const auto& [k, v] : rec.items()) row[index.at(k)] = value_from_json(v);
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(names), std::move(rows));
}

}  // namespace detail

// Column order is preserved; missing cells become null. Columns are untyped.
inline Dataset load_dataset(std::string_view bytes, DataFormat format) {
  return format == DataFormat::csv ? detail::load_csv(bytes) : detail::load_json_records(bytes);
}

inline DataFormat format_for_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot != std::string_view::npos && path.substr(dot) == ".json") return DataFormat::json_records;
  return DataFormat::csv;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io-error", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Type inference

inline MeasureType infer_column_type(const Dataset& data, std::size_t col) {
  bool any = false, all_temporal = true, all_numeric = true;
  for (const auto& row : data.raw_rows()) {
    const Value& v = row[col];
    if (is_null(v)) continue;
    any = true;
    if (all_temporal && !detail::raw_instant(v)) all_temporal = false;
    if (all_numeric && !detail::raw_number(v)) all_numeric = false;
    if (!all_temporal && !all_numeric) break;
  }
  if (!any) return MeasureType::nominal;
  // Years such as 1990 are also numbers; the temporal reading wins.
  if (all_temporal) return MeasureType::temporal;
  if (all_numeric) return MeasureType::quantitative;
  return MeasureType::nominal;
}

inline std::map<std::string, MeasureType> infer_types(const Dataset& data) {
  std::map<std::string, MeasureType> out;
  for (std::size_t c = 0; c < data.column_count(); ++c) {
    out[data.columns()[c].name] = infer_column_type(data, c);
  }
  return out;
}

// Whether every non-null raw value of a column can be read as `type`.
inline bool admits_type(const Dataset& data, std::string_view name, MeasureType type) {
  if (is_discrete(type)) return true;
  const std::size_t col = data.require_column(name);
  for (const auto& row : data.raw_rows()) {
    const Value& v = row[col];
    if (is_null(v)) continue;
    if (type == MeasureType::quantitative && !detail::raw_number(v)) return false;
    if (type == MeasureType::temporal && !detail::raw_instant(v) &&
        !std::holds_alternative<double>(v)) {
      return false;
    }
  }
  return true;
}

inline Dataset load_typed(std::string_view bytes, DataFormat format) {
  auto data = load_dataset(bytes, format);
  return data.with_types(infer_types(data));
}

inline Dataset load_typed_file(const std::string& path) {
  return load_typed(read_file(path), format_for_path(path));
}

// ---------------------------------------------------------------------------
// Value helpers over typed data

// Non-null typed values of a column, in row order.
inline std::vector<Value> column_values(const Dataset& data, std::size_t col) {
  std::vector<Value> out;
  for (const auto& row : data.rows()) {
    if (!is_null(row[col])) out.push_back(row[col]);
  }
  return out;
}

inline std::size_t distinct_count(const Dataset& data, std::string_view name) {
  const std::size_t col = data.require_column(name);
  std::set<Value> seen;
  for (const auto& row : data.rows()) {
    if (!is_null(row[col])) seen.insert(row[col]);
  }
  return seen.size();
}

// Text for a typed cell of the given column.
inline std::string display(const Value& v, const Column& col) {
  if (is_null(v)) return "null";
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  const double d = std::get<double>(v);
  if (col.type == MeasureType::temporal) return temporal::format(d, col.grain);
  return format_number(d);
}

// The wire form of a typed cell: temporal instants become year numbers or
// ISO strings so predicates stay human-readable.
inline Value wire_value(const Value& v, const Column& col) {
  if (col.type == MeasureType::temporal && std::holds_alternative<double>(v)) {
    const double ms = std::get<double>(v);
    if (col.grain == TimeGrain::year) return static_cast<double>(temporal::to_civil(ms).year);
    return temporal::format(ms, col.grain);
  }
  return v;
}

// Inverse of wire_value: coerce a user/wire scalar into the typed space of
// a column. Returns null when the scalar cannot be read as that type.
inline Value coerce_to_column(const Value& v, const Column& col) {
  if (is_null(v)) return v;
  return detail::typed_cell(v, col.type.value_or(MeasureType::nominal));
}

// ---------------------------------------------------------------------------
// Key inference

namespace detail {

inline std::vector<std::uint32_t> value_codes(const Dataset& data, std::size_t col,
                                              std::size_t& distinct, bool& has_null) {
  std::map<Value, std::uint32_t> ids;
  std::vector<std::uint32_t> codes;
  codes.reserve(data.row_count());
  has_null = false;
  for (const auto& row : data.rows()) {
    if (is_null(row[col])) {
      has_null = true;
      codes.push_back(0);
      continue;
    }
    auto [it, inserted] = ids.emplace(row[col], static_cast<std::uint32_t>(ids.size()));
    codes.push_back(it->second);
  }
  distinct = ids.size();
  return codes;
}

}  // namespace detail

inline constexpr std::size_t kMaxKeySize = 4;

// Minimal composite key over the selected temporal/nominal/ordinal columns.
// Preference: fewest fields, then smallest product of distinct counts, then
// earliest columns. Empty when no subset of size <= 4 uniquely indexes rows.
inline std::vector<std::string> infer_key(const Dataset& data,
                                          const std::vector<std::string>& selected) {
  std::vector<std::size_t> candidates;
  for (std::size_t c = 0; c < data.column_count(); ++c) {
    const auto& col = data.columns()[c];
    if (std::find(selected.begin(), selected.end(), col.name) == selected.end()) continue;
    if (col.type.value_or(MeasureType::nominal) == MeasureType::quantitative) continue;
    candidates.push_back(c);
  }
  for (const auto& s : selected) data.require_column(s);
  if (data.row_count() == 0 || candidates.empty()) return {};

  struct Coded {
    std::vector<std::uint32_t> codes;
    std::size_t distinct = 0;
    bool has_null = false;
  };
  std::vector<Coded> coded;
  for (auto c : candidates) {
    Coded k;
    k.codes = detail::value_codes(data, c, k.distinct, k.has_null);
    coded.push_back(std::move(k));
  }

  const std::size_t n = candidates.size();
  const std::size_t max_size = std::min(kMaxKeySize, n);
  for (std::size_t size = 1; size <= max_size; ++size) {
    std::optional<std::vector<std::size_t>> best;
    double best_product = 0.0;
    // Lexicographic combinations of candidate positions.
    std::vector<std::size_t> pick(size);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      bool usable = true;
      double product = 1.0;
      for (auto p : pick) {
        if (coded[p].has_null) usable = false;
        product *= static_cast<double>(coded[p].distinct);
      }
      if (usable && product >= static_cast<double>(data.row_count())) {
        std::vector<std::vector<std::uint32_t>> tuples;
        tuples.reserve(data.row_count());
        for (std::size_t r = 0; r < data.row_count(); ++r) {
          std::vector<std::uint32_t> t;
          for (auto p : pick) t.push_back(coded[p].codes[r]);
          tuples.push_back(std::move(t));
        }
        std::sort(tuples.begin(), tuples.end());
        const bool unique = std::adjacent_find(tuples.begin(), tuples.end()) == tuples.end();
        if (unique && (!best || product < best_product)) {
          best = pick;
          best_product = product;
        }
      }
      // next combination
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (best) {
      std::vector<std::string> key;
      for (auto p : *best) key.push_back(data.columns()[candidates[p]].name);
      return key;
    }
  }
  return {};
}

}  // namespace mmr
