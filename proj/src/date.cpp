#include "enscal/date.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "enscal/errors.hpp"

namespace enscal {
namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian); exact for
// any year handled here. Standard era-based formulation.
long days_from_civil(long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long>(doe) - 719468;
}

struct Civil {
  long y;
  unsigned m;
  unsigned d;
};

Civil civil_from_days(long z) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const long y = static_cast<long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

bool is_leap(long y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

int days_in_month(long y, unsigned m) {
  static constexpr std::array<int, 12> lens{31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lens[m - 1];
}

int parse_digits(std::string_view s, const std::string& what) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail_data("bad date field '" + std::string(s) + "' in " + what);
  return v;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 ||
      day > days_in_month(year, static_cast<unsigned>(month)))
    fail_data("invalid calendar date " + std::to_string(year) + "-" +
              std::to_string(month) + "-" + std::to_string(day));
  return Date(days_from_civil(year, static_cast<unsigned>(month),
                              static_cast<unsigned>(day)));
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
    fail_data("date not in YYYY-MM-DD form: '" + std::string(iso) + "'");
  const std::string what(iso);
  int y = parse_digits(iso.substr(0, 4), what);
  int m = parse_digits(iso.substr(5, 2), what);
  int d = parse_digits(iso.substr(8, 2), what);
  return from_ymd(y, m, d);
}

std::string Date::iso() const {
  Civil c = civil_from_days(serial_);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04ld-%02u-%02u", c.y, c.m, c.d);
  return buf;
}

int Date::year() const { return static_cast<int>(civil_from_days(serial_).y); }
int Date::month() const { return static_cast<int>(civil_from_days(serial_).m); }
int Date::day() const { return static_cast<int>(civil_from_days(serial_).d); }

}  // namespace enscal
