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

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bess {

// Wall-clock instant in market local time (no zone), stored as seconds since
// 1970-01-01T00:00:00. The NEM runs on a fixed UTC+10 clock, so there is no
// daylight-saving discontinuity to model.
class Timestamp {
 public:
  constexpr Timestamp() = default;
  static constexpr Timestamp FromSeconds(std::int64_t s) { return Timestamp(s); }
  static Timestamp FromCivil(int year, unsigned month, unsigned day,
                             int hour = 0, int minute = 0, int second = 0);

  constexpr std::int64_t seconds() const { return seconds_; }

  constexpr Timestamp PlusMinutes(std::int64_t m) const {
    return Timestamp(seconds_ + 60 * m);
  }
  // Whole minutes from `other` to this instant.
  constexpr std::int64_t MinutesSince(Timestamp other) const {
    return (seconds_ - other.seconds_) / 60;
  }

  // Seconds into the calendar day, [0, 86400).
  int SecondOfDay() const;

  constexpr auto operator<=>(const Timestamp&) const = default;

 private:
  constexpr explicit Timestamp(std::int64_t s) : seconds_(s) {}
  std::int64_t seconds_ = 0;
};

inline constexpr int kHalfHourMinutes = 30;
inline constexpr int kFiveMinutes = 5;
inline constexpr int kIntervalsPerHalfHour = 6;

bool IsAligned(Timestamp t, int minutes);
inline bool IsHalfHourAligned(Timestamp t) { return IsAligned(t, kHalfHourMinutes); }
inline bool IsFiveMinuteAligned(Timestamp t) { return IsAligned(t, kFiveMinutes); }

// Start of the half-hour containing `t`.
Timestamp FloorHalfHour(Timestamp t);

// The NEM trading day runs 04:00 -> 04:00 local time. Returns the 04:00 instant
// that opens the trading day containing `t`.
Timestamp TradingDayStart(Timestamp t);

inline constexpr int kMinHorizon = 32;
inline constexpr int kMaxHorizon = 80;

// Number of half-hour intervals a pre-dispatch run at `t` covers: up to 04:00
// of the next trading day for runs before 12:30, otherwise up to 04:00 of the
// trading day after, clamped to [kMinHorizon, kMaxHorizon]. `t` must be
// half-hour aligned (throws std::invalid_argument otherwise).
int horizon_length(Timestamp t);

// Parses with a strftime-like pattern supporting %Y %m %d %H %M %S and literal
// characters. Returns nullopt on any mismatch.
std::optional<Timestamp> ParseTimestamp(std::string_view text,
                                        std::string_view format);

// Inverse of ParseTimestamp for the same directives.
std::string FormatTimestamp(Timestamp t, std::string_view format);

// ISO-8601 without zone suffix; accepts either 'T' or ' ' as the separator.
std::optional<Timestamp> ParseIso(std::string_view text);
std::string FormatIso(Timestamp t);

}  // namespace bess
