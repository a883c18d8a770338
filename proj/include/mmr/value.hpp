#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "mmr/error.hpp"

namespace mmr {

using Json = nlohmann::ordered_json;

enum class MeasureType { quantitative, nominal, ordinal, temporal };

inline std::string_view to_string(MeasureType t) {
  switch (t) {
    case MeasureType::quantitative: return "quantitative";
    case MeasureType::nominal: return "nominal";
    case MeasureType::ordinal: return "ordinal";
    case MeasureType::temporal: return "temporal";
  }
  return "nominal";
}

inline MeasureType measure_type_from_string(std::string_view s) {
  if (s == "quantitative" || s == "Q") return MeasureType::quantitative;
  if (s == "nominal" || s == "N") return MeasureType::nominal;
  if (s == "ordinal" || s == "O") return MeasureType::ordinal;
  if (s == "temporal" || s == "T") return MeasureType::temporal;
  throw Error("invalid-measure-type", "unknown measure type '" + std::string(s) + "'");
}

// Continuous types order numerically and can be binned.
inline bool is_continuous(MeasureType t) {
  return t == MeasureType::quantitative || t == MeasureType::temporal;
}

// Ordinal is accepted by the model but behaves as nominal for heuristics.
inline bool is_discrete(MeasureType t) {
  return t == MeasureType::nominal || t == MeasureType::ordinal;
}

// A single cell. Quantitative and temporal cells hold doubles once typed
// (temporal as UTC epoch milliseconds); nominal/ordinal cells hold strings.
using Value = std::variant<std::monostate, double, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

// Integral values print without a decimal point; everything else is rounded
// to two decimals with trailing zeros removed ("61.888" -> "61.89").
inline std::string format_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  const double rounded = std::round(v * 100.0) / 100.0;
  char buf[64];
  if (std::floor(rounded) == rounded && std::fabs(rounded) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", rounded);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", rounded);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s == "-0" ? "0" : s;
  }
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

// Lossless-enough text form of a raw number, used when a numeric cell is
// reinterpreted as a category label ("2", "3.5").
inline std::string number_label(double v) {
  char buf[64];
  if (std::floor(v) == v && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.15g", v);
  }
  return buf;
}

inline Json to_json(const Value& v) {
  if (std::holds_alternative<double>(v)) {
    const double d = std::get<double>(v);
    if (std::floor(d) == d && std::fabs(d) < 9e15) return Json(static_cast<long long>(d));
    return Json(d);
  }
  if (std::holds_alternative<std::string>(v)) return Json(std::get<std::string>(v));
  return Json(nullptr);
}

inline Value value_from_json(const Json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return std::string(j.get<bool>() ? "true" : "false");
  throw Error("parse-error", "expected a scalar value, got " + j.dump());
}

}  // namespace mmr
