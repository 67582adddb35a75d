#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace sentmic {

using Date = std::chrono::year_month_day;

namespace detail {

inline bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

inline int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

inline std::optional<Date> make_date(int y, int m, int d) {
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

}  // namespace detail

/// `YYYY-MM-DD`; also accepts single-digit month/day (`2020-9-9`) as in forum exports.
inline std::optional<Date> parse_iso_date(std::string_view s) {
  const auto p1 = s.find('-');
  if (p1 == std::string_view::npos) return std::nullopt;
  const auto p2 = s.find('-', p1 + 1);
  if (p2 == std::string_view::npos) return std::nullopt;
  const auto ys = s.substr(0, p1);
  const auto ms = s.substr(p1 + 1, p2 - p1 - 1);
  const auto ds = s.substr(p2 + 1);
  if (ys.size() != 4 || ms.empty() || ms.size() > 2 || ds.empty() || ds.size() > 2) return std::nullopt;
  if (!detail::all_digits(ys) || !detail::all_digits(ms) || !detail::all_digits(ds)) return std::nullopt;
  return detail::make_date(detail::to_int(ys), detail::to_int(ms), detail::to_int(ds));
}

/// `YYYYMMDD`, the exchange data layout.
inline std::optional<Date> parse_compact_date(std::string_view s) {
  if (s.size() != 8 || !detail::all_digits(s)) return std::nullopt;
  return detail::make_date(detail::to_int(s.substr(0, 4)), detail::to_int(s.substr(4, 2)),
                           detail::to_int(s.substr(6, 2)));
}

inline std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

inline std::string format_compact_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d%02u%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

inline Date add_days(const Date& d, int days) {
  return Date{std::chrono::sys_days{d} + std::chrono::days{days}};
}

}  // namespace sentmic
