#pragma once

// Numeric and temporal scale utilities shared by every output modality.
//
// Axis ticks reproduce the d3-array `ticks` algorithm used by the Vega-Lite
// renderer (linear scales) and d3-time's UTC tick intervals (time scales), so
// that spoken audio ticks can be recomputed to match rendered axis ticks.
// Binning uses "nice" steps of the form {1, 2, 5} x 10^k.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mmr/temporal.hpp"

namespace mmr::scale {

// A bin [lo, hi), or [lo, hi] when closed. The top bin of a binning is
// closed so the domain maximum is covered.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool closed = false;

  bool contains(double v) const { return v >= lo && (closed ? v <= hi : v < hi); }
  bool operator==(const Interval&) const = default;
};

// ---------------------------------------------------------------------------
// d3-array ticks

struct TickSpec {
  double i1 = 0, i2 = 0, inc = 0;
};

inline TickSpec tick_spec(double start, double stop, double count) {
  const double e10 = std::sqrt(50.0), e5 = std::sqrt(10.0), e2 = std::sqrt(2.0);
  const double step = (stop - start) / std::max(0.0, count);
  const double power = std::floor(std::log10(step));
  const double error = step / std::pow(10.0, power);
  const double factor = error >= e10 ? 10 : error >= e5 ? 5 : error >= e2 ? 2 : 1;
  double i1, i2, inc;
  if (power < 0) {
    inc = std::pow(10.0, -power) / factor;
    i1 = std::round(start * inc);
    i2 = std::round(stop * inc);
    if (i1 / inc < start) ++i1;
    if (i2 / inc > stop) --i2;
    inc = -inc;
  } else {
    inc = std::pow(10.0, power) * factor;
    i1 = std::round(start / inc);
    i2 = std::round(stop / inc);
    if (i1 * inc < start) ++i1;
    if (i2 * inc > stop) --i2;
  }
  if (i2 < i1 && 0.5 <= count && count < 2) return tick_spec(start, stop, count * 2);
  return {i1, i2, inc};
}

inline std::vector<double> ticks(double start, double stop, double count) {
  if (!(count > 0)) return {};
  if (start == stop) return {start};
  const bool reverse = stop < start;
  if (reverse) std::swap(start, stop);
  const auto [i1, i2, inc] = tick_spec(start, stop, count);
  if (!(i2 >= i1) || !std::isfinite(inc) || inc == 0) return {};
  const auto n = static_cast<std::size_t>(i2 - i1 + 1);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = i1 + static_cast<double>(i);
    out[i] = inc < 0 ? k / -inc : k * inc;
  }
  if (reverse) std::reverse(out.begin(), out.end());
  return out;
}

inline double tick_increment(double start, double stop, double count) {
  return tick_spec(start, stop, count).inc;
}

inline double tick_step(double start, double stop, double count) {
  const bool reverse = stop < start;
  const double inc = reverse ? tick_increment(stop, start, count) : tick_increment(start, stop, count);
  return (reverse ? -1 : 1) * (inc < 0 ? 1 / -inc : inc);
}

// d3 linear.nice(count)
inline std::pair<double, double> nice_domain(double start, double stop, double count = 10) {
  if (stop < start) std::swap(start, stop);
  double prestep = std::nan("");
  for (int iter = 0; iter < 10; ++iter) {
    const double step = tick_increment(start, stop, count);
    if (step == prestep) break;
    if (step > 0) {
      start = std::floor(start / step) * step;
      stop = std::ceil(stop / step) * step;
    } else if (step < 0) {
      start = std::ceil(start * step) / step;
      stop = std::floor(stop * step) / step;
    } else {
      break;
    }
    prestep = step;
  }
  return {start, stop};
}

// Vega-Lite default axis tick count for a 200px continuous view: ceil(200 / 40).
inline constexpr double kAxisTickCount = 5;
// Tick density used for spoken ticks when no visual axis exists.
inline constexpr double kKeyTickCount = 10;

// Ticks of a quantitative x/y axis: Vega-Lite includes zero and nices the
// domain by default for unbinned quantitative position fields.
inline std::vector<double> quantitative_axis_ticks(double lo, double hi) {
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  auto [a, b] = nice_domain(lo, hi, 10);
  return ticks(a, b, kAxisTickCount);
}

// ---------------------------------------------------------------------------
// UTC time ticks (d3-time intervals from one day upward)

namespace detail {

enum class TimeUnit { day, week, month, year };

struct TimeInterval {
  TimeUnit unit;
  int step;
  double duration;
};

inline constexpr double kDay = temporal::kMsPerDay;
inline constexpr double kWeek = kDay * 7;
inline constexpr double kMonth = kDay * 30;
inline constexpr double kYear = kDay * 365;

// First instant >= ms that lies on the interval.
inline double ceil_to(double ms, TimeUnit unit, int step) {
  auto c = temporal::to_civil(ms);
  const bool on_day = c.hour == 0 && c.minute == 0 && c.second == 0 && c.millisecond == 0;
  switch (unit) {
    case TimeUnit::day: {
      double d = std::floor(ms / kDay) * kDay;
      if (d < ms) d += kDay;
      for (;;) {
        auto dc = temporal::to_civil(d);
        if ((dc.day - 1) % static_cast<unsigned>(step) == 0) return d;
        d += kDay;
      }
    }
    case TimeUnit::week: {
      double d = std::floor(ms / kDay) * kDay;
      if (d < ms) d += kDay;
      // 1970-01-01 was a Thursday; Sunday-based weeks.
      while (static_cast<long long>(std::floor(d / kDay) + 4) % 7 != 0) d += kDay;
      return d;
    }
    case TimeUnit::month: {
      int y = c.year;
      int m = static_cast<int>(c.month) - 1;
      if (!(c.day == 1 && on_day)) ++m;
      while (m % step != 0) ++m;
      y += m / 12;
      m %= 12;
      return temporal::from_civil(y, static_cast<unsigned>(m + 1), 1);
    }
    case TimeUnit::year: {
      int y = c.year;
      if (!(c.month == 1 && c.day == 1 && on_day)) ++y;
      while (y % step != 0) ++y;
      return temporal::year_start(y);
    }
  }
  return ms;
}

inline double advance(double ms, TimeUnit unit, int step) {
  auto c = temporal::to_civil(ms);
  switch (unit) {
    case TimeUnit::day: {
      double d = ms + kDay;
      // every(step) restarts at each month start
      while ((temporal::to_civil(d).day - 1) % static_cast<unsigned>(step) != 0) d += kDay;
      return d;
    }
    case TimeUnit::week: return ms + kWeek * step;
    case TimeUnit::month: {
      int m = static_cast<int>(c.month) - 1 + step;
      return temporal::from_civil(c.year + m / 12, static_cast<unsigned>(m % 12 + 1), 1);
    }
    case TimeUnit::year: return temporal::year_start(c.year + step);
  }
  return ms;
}

}  // namespace detail

inline std::vector<double> time_ticks(double start, double stop, double count) {
  using namespace detail;
  if (stop < start) std::swap(start, stop);
  static const std::array<TimeInterval, 6> kIntervals = {{
      {TimeUnit::day, 1, kDay},
      {TimeUnit::day, 2, 2 * kDay},
      {TimeUnit::week, 1, kWeek},
      {TimeUnit::month, 1, kMonth},
      {TimeUnit::month, 3, 3 * kMonth},
      {TimeUnit::year, 1, kYear},
  }};
  const double target = std::fabs(stop - start) / count;
  std::size_t i = 0;
  while (i < kIntervals.size() && kIntervals[i].duration <= target) ++i;
  TimeUnit unit;
  int step;
  if (i == kIntervals.size()) {
    unit = TimeUnit::year;
    step = std::max(1, static_cast<int>(tick_step(start / kYear, stop / kYear, count)));
  } else if (i == 0) {
    unit = TimeUnit::day;  // sub-day resolutions are not produced
    step = 1;
  } else {
    const auto& pick = (target / kIntervals[i - 1].duration < kIntervals[i].duration / target)
                           ? kIntervals[i - 1]
                           : kIntervals[i];
    unit = pick.unit;
    step = pick.step;
  }
  std::vector<double> out;
  for (double t = ceil_to(start, unit, step); t <= stop; t = advance(t, unit, step)) {
    out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nice binning

namespace detail {

// Nice step m * 10^e with m in {1, 2, 5}.
struct NiceStep {
  int mantissa = 1;
  int exponent = 0;

  double value() const {
    return exponent >= 0 ? mantissa * std::pow(10.0, exponent)
                         : mantissa / std::pow(10.0, -exponent);
  }
  double at(double k) const {
    return exponent >= 0 ? k * mantissa * std::pow(10.0, exponent)
                         : k * mantissa / std::pow(10.0, -exponent);
  }
  NiceStep larger() const {
    if (mantissa == 1) return {2, exponent};
    if (mantissa == 2) return {5, exponent};
    return {1, exponent + 1};
  }
  NiceStep smaller() const {
    if (mantissa == 5) return {2, exponent};
    if (mantissa == 2) return {1, exponent};
    return {5, exponent - 1};
  }
};

inline std::pair<double, double> bin_index_range(double lo, double hi, const NiceStep& s) {
  const double step = s.value();
  const double eps = 1e-9;
  double first = std::floor(lo / step + eps);
  double last = std::ceil(hi / step - eps);
  if (last <= first) last = first + 1;
  return {first, last};
}

inline std::vector<Interval> bins_for(double lo, double hi, const NiceStep& s) {
  auto [first, last] = bin_index_range(lo, hi, s);
  std::vector<Interval> out;
  for (double k = first; k < last; ++k) out.push_back({s.at(k), s.at(k + 1), false});
  out.back().closed = true;
  return out;
}

inline std::size_t bin_count(double lo, double hi, const NiceStep& s) {
  auto [first, last] = bin_index_range(lo, hi, s);
  return static_cast<std::size_t>(last - first);
}

inline NiceStep step_floor(double x) {
  const int e = static_cast<int>(std::floor(std::log10(x)));
  return {1, e};
}

}  // namespace detail

// Equal-width bins with the smallest nice step that yields at most
// `max_count` bins covering [lo, hi]. `min_step` bounds the step from below
// (1 for integer-valued units such as years or days). A constant domain
// yields one degenerate closed interval [lo, lo].
inline std::vector<Interval> nice_bins(double lo, double hi, std::size_t max_count,
                                       double min_step = 0.0) {
  if (hi < lo) std::swap(lo, hi);
  if (hi == lo) return {Interval{lo, lo, true}};
  max_count = std::max<std::size_t>(max_count, 1);
  auto s = detail::step_floor((hi - lo) / static_cast<double>(max_count));
  s = s.smaller();
  while (s.value() < min_step || detail::bin_count(lo, hi, s) > max_count) s = s.larger();
  return detail::bins_for(lo, hi, s);
}

// Zoomed re-binning: the largest nice step that still yields at least
// `min_count` bins over [lo, hi] (0-100 filtered to 50-70 gives four 5-wide bins).
inline std::vector<Interval> rescope_bins(double lo, double hi, std::size_t min_count,
                                          double min_step = 0.0) {
  if (hi < lo) std::swap(lo, hi);
  if (hi == lo) return {Interval{lo, lo, true}};
  auto s = detail::step_floor(hi - lo).larger().larger().larger();
  while (detail::bin_count(lo, hi, s) < min_count) {
    auto next = s.smaller();
    if (next.value() < min_step) break;
    s = next;
  }
  return detail::bins_for(lo, hi, s);
}

// Temporal bins snap to calendar boundaries: whole years when the span
// covers at least two years, otherwise whole days.
enum class BinMode { at_most, at_least };

inline std::vector<Interval> temporal_bins(double lo_ms, double hi_ms, std::size_t count, BinMode mode) {
  if (hi_ms < lo_ms) std::swap(lo_ms, hi_ms);
  if (hi_ms == lo_ms) return {Interval{lo_ms, lo_ms, true}};
  auto bin = [&](double a, double b) {
    return mode == BinMode::at_most ? nice_bins(a, b, count, 1.0) : rescope_bins(a, b, count, 1.0);
  };
  const auto lo_c = temporal::to_civil(lo_ms);
  const auto hi_c = temporal::to_civil(hi_ms);
  std::vector<Interval> out;
  if ((hi_ms - lo_ms) >= 2 * detail::kYear) {
    const double y_hi = hi_ms > temporal::year_start(hi_c.year) ? hi_c.year + 1 : hi_c.year;
    for (const auto& b : bin(lo_c.year, y_hi)) {
      out.push_back({temporal::year_start(static_cast<int>(b.lo)),
                     temporal::year_start(static_cast<int>(b.hi)), b.closed});
    }
  } else {
    const double d_lo = std::floor(lo_ms / detail::kDay);
    const double d_hi = std::ceil(hi_ms / detail::kDay);
    for (const auto& b : bin(d_lo, d_hi)) {
      out.push_back({b.lo * detail::kDay, b.hi * detail::kDay, b.closed});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pitch

// Linear map from data values to Hz. A constant domain maps to the midpoint.
struct FrequencyScale {
  double domain_min = 0.0;
  double domain_max = 1.0;
  double low_hz = 220.0;
  double high_hz = 880.0;

  double operator()(double v) const {
    if (!(domain_max > domain_min)) return (low_hz + high_hz) / 2.0;
    const double t = std::clamp((v - domain_min) / (domain_max - domain_min), 0.0, 1.0);
    return low_hz + t * (high_hz - low_hz);
  }
};

}  // namespace mmr::scale
