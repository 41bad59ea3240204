#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace diskadapt {

/// A calendar day in the proleptic Gregorian calendar, stored as days since
/// 1970-01-01. One day is the atomic simulation tick.
class Date {
public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Parses strict `YYYY-MM-DD`. Throws std::invalid_argument otherwise.
  static Date parse(std::string_view text);

  std::string iso() const;

  constexpr std::int32_t days() const { return days_; }

  constexpr Date operator+(std::int32_t n) const { return Date(days_ + n); }
  constexpr Date operator-(std::int32_t n) const { return Date(days_ - n); }
  constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }
  constexpr Date& operator+=(std::int32_t n) {
    days_ += n;
    return *this;
  }
  constexpr Date& operator++() {
    ++days_;
    return *this;
  }

  constexpr auto operator<=>(const Date&) const = default;

private:
  std::int32_t days_ = 0;
};

}  // namespace diskadapt
