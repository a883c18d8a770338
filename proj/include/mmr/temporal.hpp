#pragma once

// Calendar parsing and formatting. Instants are UTC milliseconds since the
// Unix epoch, stored as double so they share arithmetic with quantitative data.

#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace mmr {

// How precisely a temporal column's values are written. Governs formatting
// and which tick/bin units make sense.
enum class TimeGrain { year, day, datetime };

struct ParsedInstant {
  double ms = 0.0;
  TimeGrain grain = TimeGrain::day;
};

namespace temporal {

inline constexpr double kMsPerDay = 86400000.0;

inline double from_civil(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  const sys_days days_since{year{y} / month{m} / day{d}};
  return static_cast<double>(days_since.time_since_epoch().count()) * kMsPerDay;
}

inline double year_start(int y) { return from_civil(y, 1, 1); }

struct Civil {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millisecond = 0;
};

inline Civil to_civil(double ms) {
  using namespace std::chrono;
  const auto whole_days = static_cast<std::int64_t>(std::floor(ms / kMsPerDay));
  const year_month_day ymd{sys_days{days{whole_days}}};
  auto rem = static_cast<std::int64_t>(std::llround(ms - static_cast<double>(whole_days) * kMsPerDay));
  Civil c;
  c.year = static_cast<int>(ymd.year());
  c.month = static_cast<unsigned>(ymd.month());
  c.day = static_cast<unsigned>(ymd.day());
  c.hour = static_cast<int>(rem / 3600000);
  rem %= 3600000;
  c.minute = static_cast<int>(rem / 60000);
  rem %= 60000;
  c.second = static_cast<int>(rem / 1000);
  c.millisecond = static_cast<int>(rem % 1000);
  return c;
}

inline bool valid_date(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  return year_month_day{year{y} / month{m} / day{d}}.ok();
}

namespace detail {

inline bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

inline std::optional<unsigned> month_from_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> kShort = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  static constexpr std::array<std::string_view, 12> kLong = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  std::string lower(name);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (unsigned i = 0; i < 12; ++i) {
    if (lower == kShort[i] || lower == kLong[i]) return i + 1;
  }
  return std::nullopt;
}

// "HH:MM[:SS[.fff]][Z|±HH:MM]" starting at pos; returns ms offset within the
// day (already corrected to UTC) or nullopt.
inline std::optional<double> parse_clock(std::string_view s, std::size_t pos) {
  int hh = 0, mm = 0, ss = 0, frac = 0;
  if (!digits(s, pos, 2, hh) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
      !digits(s, pos + 3, 2, mm)) {
    return std::nullopt;
  }
  pos += 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!digits(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t n = 0;
      int scale = 100;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
        if (n < 3) frac += (s[pos] - '0') * scale;
        scale /= 10;
        ++pos;
        ++n;
      }
      if (n == 0) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  double offset_ms = 0.0;
  if (pos < s.size()) {
    if (s[pos] == 'Z' && pos + 1 == s.size()) {
      ++pos;
    } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
      int oh = 0, om = 0;
      if (!digits(s, pos + 1, 2, oh) || !digits(s, pos + 4, 2, om)) return std::nullopt;
      offset_ms = (oh * 60.0 + om) * 60000.0 * (s[pos] == '+' ? 1.0 : -1.0);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  return ((hh * 60.0 + mm) * 60.0 + ss) * 1000.0 + frac - offset_ms;
}

}  // namespace detail

// Accepts YYYY-MM-DD and YYYY/MM/DD with an optional "THH:MM[:SS[.fff]]"
// (or space-separated) clock and zone suffix, and "Mon D YYYY" style dates.
// Bare 4-digit years are handled by parse_year, not here.
inline std::optional<ParsedInstant> parse_date(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  int y = 0, m = 0, d = 0;
  if (s.size() >= 10 && detail::digits(s, 0, 4, y) && (s[4] == '-' || s[4] == '/') &&
      s[7] == s[4] && detail::digits(s, 5, 2, m) && detail::digits(s, 8, 2, d)) {
    if (!valid_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d))) return std::nullopt;
    const double base = from_civil(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
    if (s.size() == 10) return ParsedInstant{base, TimeGrain::day};
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto clock = detail::parse_clock(s, 11);
    if (!clock) return std::nullopt;
    return ParsedInstant{base + *clock, TimeGrain::datetime};
  }
  // "Jan 1 2000" / "January 1, 2000"
  const auto sp1 = s.find(' ');
  if (sp1 == std::string_view::npos) return std::nullopt;
  auto mon = detail::month_from_name(s.substr(0, sp1));
  if (!mon) return std::nullopt;
  auto rest = s.substr(sp1 + 1);
  const auto sp2 = rest.find(' ');
  if (sp2 == std::string_view::npos) return std::nullopt;
  auto day_part = rest.substr(0, sp2);
  if (!day_part.empty() && day_part.back() == ',') day_part.remove_suffix(1);
  auto year_part = rest.substr(sp2 + 1);
  if (day_part.empty() || day_part.size() > 2 || year_part.size() != 4) return std::nullopt;
  if (!detail::digits(day_part, 0, day_part.size(), d) || !detail::digits(year_part, 0, 4, y)) {
    return std::nullopt;
  }
  if (!valid_date(y, *mon, static_cast<unsigned>(d))) return std::nullopt;
  return ParsedInstant{from_civil(y, *mon, static_cast<unsigned>(d)), TimeGrain::day};
}

// A 4-digit calendar year in [1000, 2999].
inline bool is_year_number(double v) {
  return std::floor(v) == v && v >= 1000.0 && v <= 2999.0;
}

inline std::optional<int> parse_year(std::string_view s) {
  int y = 0;
  if (s.size() != 4 || !detail::digits(s, 0, 4, y)) return std::nullopt;
  if (!is_year_number(y)) return std::nullopt;
  return y;
}

inline std::string format(double ms, TimeGrain grain) {
  const Civil c = to_civil(ms);
  char buf[40];
  switch (grain) {
    case TimeGrain::year:
      std::snprintf(buf, sizeof buf, "%04d", c.year);
      break;
    case TimeGrain::day:
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
      break;
    case TimeGrain::datetime:
      if (c.millisecond != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", c.year, c.month, c.day,
                      c.hour, c.minute, c.second, c.millisecond);
      } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", c.year, c.month, c.day,
                      c.hour, c.minute, c.second);
      }
      break;
  }
  return buf;
}

}  // namespace temporal
}  // namespace mmr
