#pragma once

#include <cstdint>
#include <string>

namespace ccast {

// Days since 1970-01-01 for a proleptic Gregorian date.
int64_t days_from_civil(int year, unsigned month, unsigned day);

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SSZ" and the same without the
// trailing Z. Returns Unix seconds. Throws on anything else.
int64_t parse_iso8601_utc(const std::string& text);

std::string format_iso8601_utc(int64_t unix_seconds);

}  // namespace ccast
