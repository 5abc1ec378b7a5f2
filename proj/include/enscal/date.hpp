#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace enscal {

// Calendar date without time of day, stored as days since 1970-01-01.
// Uses the standard civil-calendar day-count algorithms, exact over the
// proleptic Gregorian calendar.
class Date {
 public:
  Date() = default;
  static Date from_ymd(int year, int month, int day);   // validates
  static Date from_serial(long serial) { return Date(serial); }
  static Date parse(std::string_view iso);              // strict YYYY-MM-DD

  std::string iso() const;
  long serial() const { return serial_; }
  int year() const;
  int month() const;
  int day() const;

  Date plus_days(long n) const { return Date(serial_ + n); }
  long operator-(Date other) const { return serial_ - other.serial_; }
  auto operator<=>(const Date&) const = default;

 private:
  explicit Date(long serial) : serial_(serial) {}
  long serial_ = 0;
};

}  // namespace enscal
