#include "ccast/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "ccast/error.hpp"

namespace ccast {

int64_t days_from_civil(int year, unsigned month, unsigned day) {
  // Howard Hinnant's algorithm, shifted so the era starts in March.
  year -= month <= 2;
  const int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);
  const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

namespace {

void civil_from_days(int64_t z, int& year, unsigned& month, unsigned& day) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = static_cast<int>(y + (month <= 2));
}

int parse_int_field(const std::string& s, size_t pos, size_t len) {
  if (pos + len > s.size()) throw Error("timestamp too short: " + s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, value);
  if (ec != std::errc() || ptr != s.data() + pos + len)
    throw Error("bad timestamp field in: " + s);
  return value;
}

}  // namespace

int64_t parse_iso8601_utc(const std::string& text) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-')
    throw Error("bad ISO-8601 date: " + text);
  const int year = parse_int_field(text, 0, 4);
  const int month = parse_int_field(text, 5, 2);
  const int day = parse_int_field(text, 8, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31)
    throw Error("bad ISO-8601 date: " + text);
  {
    // Reject days that roll into the next month, e.g. February 30th.
    int y2;
    unsigned m2, d2;
    civil_from_days(days_from_civil(year, month, day), y2, m2, d2);
    if (y2 != year || m2 != static_cast<unsigned>(month) || d2 != static_cast<unsigned>(day))
      throw Error("bad ISO-8601 date: " + text);
  }

  int hour = 0, minute = 0, second = 0;
  if (text.size() > 10) {
    if (text[10] != 'T' || text.size() < 16 || text[13] != ':')
      throw Error("bad ISO-8601 time: " + text);
    hour = parse_int_field(text, 11, 2);
    minute = parse_int_field(text, 14, 2);
    size_t rest = 16;
    if (text.size() >= 19 && text[16] == ':') {
      second = parse_int_field(text, 17, 2);
      rest = 19;
    }
    if (rest < text.size() && !(rest + 1 == text.size() && text[rest] == 'Z'))
      throw Error("bad ISO-8601 suffix: " + text);
    if (hour > 23 || minute > 59 || second > 60)
      throw Error("bad ISO-8601 time: " + text);
  }
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string format_iso8601_utc(int64_t unix_seconds) {
  int64_t days = unix_seconds / 86400;
  int64_t rem = unix_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  int year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", year, month, day,
                static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace ccast
