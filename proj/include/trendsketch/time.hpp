// Copyright 2026 The TrendSketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file time.hpp
/// @brief ISO-8601 and bare-year timestamps as seconds since the epoch.

#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace trendsketch::timeutil {

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

inline double civil_seconds(int y, unsigned m, unsigned d) {
  using namespace std::chrono;
  const sys_days days{year{y} / month{m} / day{d}};
  return static_cast<double>(days.time_since_epoch().count()) * 86400.0;
}

}  // namespace detail

/// January 1st of @p y, 00:00 UTC.
inline double year_to_seconds(int y) { return detail::civil_seconds(y, 1, 1); }

/// Accepts YYYY, YYYY-MM, YYYY-MM-DD, optionally followed by 'T' or ' ' and
/// HH:MM[:SS[.fff]], optionally followed by 'Z' or +HH:MM / -HH:MM.
inline std::optional<double> parse_iso8601(std::string_view s) {
  std::size_t pos = 0;
  int y = 0, mo = 1, d = 1;
  if (!detail::read_digits(s, pos, 4, y)) return std::nullopt;
  if (pos < s.size() && s[pos] == '-') {
    ++pos;
    if (!detail::read_digits(s, pos, 2, mo)) return std::nullopt;
    if (pos < s.size() && s[pos] == '-') {
      ++pos;
      if (!detail::read_digits(s, pos, 2, d)) return std::nullopt;
    }
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  double seconds = detail::civil_seconds(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  if (pos == s.size()) return seconds;

  if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
  ++pos;
  int hh = 0, mm = 0, ss = 0;
  if (!detail::read_digits(s, pos, 2, hh) || pos >= s.size() || s[pos] != ':') {
    return std::nullopt;
  }
  ++pos;
  if (!detail::read_digits(s, pos, 2, mm)) return std::nullopt;
  double frac = 0.0;
  if (pos < s.size() && s[pos] == ':') {
    ++pos;
    if (!detail::read_digits(s, pos, 2, ss)) return std::nullopt;
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
      ++pos;
      double scale = 0.1;
      const std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        frac += (s[pos] - '0') * scale;
        scale /= 10.0;
        ++pos;
      }
      if (pos == start) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  seconds += hh * 3600.0 + mm * 60.0 + ss + frac;
  if (pos == s.size()) return seconds;
  if (s[pos] == 'Z' || s[pos] == 'z') {
    return pos + 1 == s.size() ? std::optional<double>(seconds) : std::nullopt;
  }
  if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '+' ? 1 : -1;
    ++pos;
    int oh = 0, om = 0;
    if (!detail::read_digits(s, pos, 2, oh)) return std::nullopt;
    if (pos < s.size() && s[pos] == ':') ++pos;
    if (pos < s.size() && !detail::read_digits(s, pos, 2, om)) return std::nullopt;
    if (pos != s.size()) return std::nullopt;
    return seconds - sign * (oh * 3600.0 + om * 60.0);
  }
  return std::nullopt;
}

/// Bare integer years ("1970") or ISO-8601.
inline std::optional<double> parse_year_or_iso(std::string_view s) {
  if (!s.empty() && s.size() <= 4 &&
      std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return year_to_seconds(std::stoi(std::string(s)));
  }
  return parse_iso8601(s);
}

/// UTC timestamp as YYYY-MM-DDTHH:MM:SSZ; fractional seconds are dropped.
inline std::string format_iso8601(double seconds) {
  using namespace std::chrono;
  const auto whole = static_cast<long long>(std::floor(seconds));
  const sys_days days{std::chrono::days{static_cast<int>(std::floor(whole / 86400.0))}};
  const year_month_day ymd{days};
  long long rem = whole - static_cast<long long>(days.time_since_epoch().count()) * 86400;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), rem / 3600, (rem % 3600) / 60, rem % 60);
  return buf;
}

}  // namespace trendsketch::timeutil
