// Copyright 2026 The bess-arbitrage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bess/timestamp.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace bess {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t FloorDiv(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Consumes exactly `width` digits (or up to `width` when `exact` is false).
bool ReadNumber(std::string_view text, std::size_t& pos, int width, bool exact,
                int& out) {
  int value = 0;
  int digits = 0;
  while (digits < width && pos < text.size() && text[pos] >= '0' &&
         text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0 || (exact && digits != width)) return false;
  out = value;
  return true;
}

}  // namespace

Timestamp Timestamp::FromCivil(int year, unsigned month, unsigned day, int hour,
                               int minute, int second) {
  using namespace std::chrono;
  const sys_days days{year_month_day{std::chrono::year{year},
                                     std::chrono::month{month},
                                     std::chrono::day{day}}};
  return Timestamp(static_cast<std::int64_t>(days.time_since_epoch().count()) *
                       kSecondsPerDay +
                   hour * 3600 + minute * 60 + second);
}

int Timestamp::SecondOfDay() const {
  return static_cast<int>(seconds_ - FloorDiv(seconds_, kSecondsPerDay) * kSecondsPerDay);
}

bool IsAligned(Timestamp t, int minutes) {
  const std::int64_t period = 60LL * minutes;
  return t.seconds() - FloorDiv(t.seconds(), period) * period == 0;
}

Timestamp FloorHalfHour(Timestamp t) {
  constexpr std::int64_t period = 60LL * kHalfHourMinutes;
  return Timestamp::FromSeconds(FloorDiv(t.seconds(), period) * period);
}

Timestamp TradingDayStart(Timestamp t) {
  constexpr std::int64_t kAnchor = 4 * 3600;
  const std::int64_t shifted = t.seconds() - kAnchor;
  return Timestamp::FromSeconds(FloorDiv(shifted, kSecondsPerDay) * kSecondsPerDay +
                                kAnchor);
}

int horizon_length(Timestamp t) {
  if (!IsHalfHourAligned(t)) {
    throw std::invalid_argument("horizon start " + FormatIso(t) + " is not half-hour aligned");
  }
  constexpr std::int64_t kSwitchMinutes = 8 * 60 + 30;  // 12:30, from the 04:00 anchor
  const Timestamp day_start = TradingDayStart(t);
  const int days_ahead = t.MinutesSince(day_start) < kSwitchMinutes ? 1 : 2;
  const Timestamp end = day_start.PlusMinutes(days_ahead * 24 * 60);
  const auto intervals = static_cast<int>(end.MinutesSince(t) / kHalfHourMinutes);
  return std::clamp(intervals, kMinHorizon, kMaxHorizon);
}

std::optional<Timestamp> ParseTimestamp(std::string_view text,
                                        std::string_view format) {
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      const char spec = format[++f];
      bool ok = false;
      switch (spec) {
        case 'Y': ok = ReadNumber(text, pos, 4, true, year); break;
        case 'm': ok = ReadNumber(text, pos, 2, false, month); break;
        case 'd': ok = ReadNumber(text, pos, 2, false, day); break;
        case 'H': ok = ReadNumber(text, pos, 2, false, hour); break;
        case 'M': ok = ReadNumber(text, pos, 2, true, minute); break;
        case 'S': ok = ReadNumber(text, pos, 2, true, second); break;
        case '%': ok = pos < text.size() && text[pos++] == '%'; break;
        default: return std::nullopt;
      }
      if (!ok) return std::nullopt;
    } else {
      if (pos >= text.size() || text[pos] != format[f]) return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size()) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || hour > 23 || minute > 59 ||
      second > 59) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  return Timestamp::FromCivil(year, month, day, hour, minute, second);
}

std::optional<Timestamp> ParseIso(std::string_view text) {
  if (text.size() > 10 && text[10] == ' ') {
    return ParseTimestamp(text, "%Y-%m-%d %H:%M:%S");
  }
  return ParseTimestamp(text, "%Y-%m-%dT%H:%M:%S");
}

std::string FormatTimestamp(Timestamp t, std::string_view format) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{FloorDiv(t.seconds(), kSecondsPerDay)}}};
  const int sod = t.SecondOfDay();
  std::string out;
  char buf[8];
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] != '%' || f + 1 == format.size()) {
      out += format[f];
      continue;
    }
    switch (format[++f]) {
      case 'Y': std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year())); break;
      case 'm': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.month())); break;
      case 'd': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.day())); break;
      case 'H': std::snprintf(buf, sizeof buf, "%02d", sod / 3600); break;
      case 'M': std::snprintf(buf, sizeof buf, "%02d", (sod / 60) % 60); break;
      case 'S': std::snprintf(buf, sizeof buf, "%02d", sod % 60); break;
      default: std::snprintf(buf, sizeof buf, "%c", format[f]); break;
    }
    out += buf;
  }
  return out;
}

std::string FormatIso(Timestamp t) { return FormatTimestamp(t, "%Y-%m-%dT%H:%M:%S"); }

}  // namespace bess
