#include <doctest.h>

#include "ccast/candle.hpp"
#include "ccast/error.hpp"
#include "ccast/rng.hpp"
#include "ccast/timeutil.hpp"
#include "oracles.hpp"

using namespace ccast;

TEST_CASE("civil day arithmetic hits known anchors") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(days_from_civil(1970, 1, 2) == 1);
  CHECK(days_from_civil(1969, 12, 31) == -1);
  CHECK(days_from_civil(2000, 3, 1) == 11017);  // day after a century leap day
}

TEST_CASE("iso8601 parsing accepts dates and full timestamps") {
  CHECK(parse_iso8601_utc("2019-01-01T00:00:00Z") == 1546300800);
  CHECK(parse_iso8601_utc("2019-01-01T00:00:00") == 1546300800);
  CHECK(parse_iso8601_utc("2019-01-01") == 1546300800);
  CHECK(parse_iso8601_utc("2013-05-15") == kDefaultHistoryCutoff);
  CHECK(parse_iso8601_utc("2020-02-29T12:30:00Z") == 1582979400);
  CHECK_THROWS_AS(parse_iso8601_utc("not a date"), Error);
  CHECK_THROWS_AS(parse_iso8601_utc("2019-13-01"), Error);
  CHECK_THROWS_AS(parse_iso8601_utc("2019-02-30"), Error);
  CHECK_THROWS_AS(parse_iso8601_utc("2019-01-01T25:00:00"), Error);
}

TEST_CASE("iso8601 formatting round-trips") {
  for (int64_t ts : {0LL, 1546300800LL, 1582979400LL, 1368576000LL}) {
    CHECK(parse_iso8601_utc(format_iso8601_utc(ts)) == ts);
  }
  CHECK(format_iso8601_utc(1546300800) == "2019-01-01T00:00:00Z");
}

TEST_CASE("splitmix64 matches the reference stream") {
  // Frozen outputs of the reference algorithm, computed independently.
  Rng r0(0);
  CHECK(r0.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(r0.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(r0.next_u64() == 0x06c45d188009454fULL);
  Rng r42(42);
  CHECK(r42.next_u64() == 0xbdd732262feb6e95ULL);
  CHECK(r42.next_unit() == doctest::Approx(0.1599103928769201).epsilon(1e-15));
}

TEST_CASE("uniform stays inside its bounds and varies") {
  Rng r(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = r.uniform(-0.75, 0.75);
    CHECK(x >= -0.75);
    CHECK(x < 0.75);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo < -0.5);
  CHECK(hi > 0.5);
}

TEST_CASE("mix_seed derives distinct streams") {
  CHECK(mix_seed(42, 0) != mix_seed(42, 1));
  CHECK(mix_seed(42, 1) != mix_seed(43, 1));
  CHECK(mix_seed(42, 5) == mix_seed(42, 5));
}

TEST_CASE("candle invariants are enforced") {
  Candle good{1546300800, 100.0, 101.0, 99.0, 100.5, {}};
  CHECK_NOTHROW(check_candle(good));

  Candle negative = good;
  negative.low = -1.0;
  CHECK_THROWS_AS(check_candle(negative), Error);

  Candle inverted = good;
  inverted.high = 98.0;  // below the low
  CHECK_THROWS_AS(check_candle(inverted), Error);

  Candle open_outside = good;
  open_outside.open = 102.0;  // above the high
  CHECK_THROWS_AS(check_candle(open_outside), Error);

  Candle close_outside = good;
  close_outside.close = 98.5;  // below the low
  CHECK_THROWS_AS(check_candle(close_outside), Error);
}

TEST_CASE("check_candle names the line when given one") {
  Candle bad{1546300800, 100.0, 99.0, 101.0, 100.0, {}};
  try {
    check_candle(bad, 17);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
}

TEST_CASE("validate_series passes a clean series through") {
  const CandleSeries s = oracle::series_from_closes({100, 101, 102, 103});
  const auto report = validate_series(s);
  CHECK(report.clean());
  CHECK(report.repaired == s);
}

TEST_CASE("validate_series keeps the first duplicate and reports it") {
  CandleSeries s = oracle::series_from_closes({100, 101, 102});
  Candle dup = s.candles[1];
  dup.close = 999.0;
  dup.high = 999.0;
  s.candles.insert(s.candles.begin() + 2, dup);

  const auto report = validate_series(s);
  CHECK(report.duplicates == std::vector<int64_t>{dup.timestamp});
  CHECK(report.repaired.size() == 3);
  CHECK(report.repaired.candles[1].close == 101.0);  // first occurrence won
}

TEST_CASE("validate_series sorts out-of-order bars and reports them") {
  CandleSeries s = oracle::series_from_closes({100, 101, 102});
  std::swap(s.candles[0], s.candles[2]);
  const auto report = validate_series(s);
  CHECK(!report.non_monotonic.empty());
  CHECK(report.repaired.candles.front().timestamp < report.repaired.candles.back().timestamp);
  CHECK(report.repaired.candles[0].close == 100.0);
}

TEST_CASE("validate_series fills gaps flat at the previous close") {
  CandleSeries s = oracle::series_from_closes({100, 101, 102, 103});
  s.candles[1].volume = 5.0;
  s.candles.erase(s.candles.begin() + 2);  // drop one bar
  const auto report = validate_series(s);
  CHECK(report.gaps == std::vector<int64_t>{1546300800 + 2 * 3600});
  REQUIRE(report.repaired.size() == 4);
  const Candle& fill = report.repaired.candles[2];
  CHECK(fill.open == 101.0);
  CHECK(fill.high == 101.0);
  CHECK(fill.low == 101.0);
  CHECK(fill.close == 101.0);
  REQUIRE(fill.volume.has_value());
  CHECK(*fill.volume == 0.0);
}

TEST_CASE("validate_series drops off-grid bars") {
  CandleSeries s = oracle::series_from_closes({100, 101, 102});
  Candle odd = s.candles[1];
  odd.timestamp += 1800;  // half an hour off the grid
  s.candles.insert(s.candles.begin() + 2, odd);
  const auto report = validate_series(s);
  CHECK(report.off_grid == std::vector<int64_t>{odd.timestamp});
  CHECK(report.repaired.size() == 3);
  for (size_t i = 1; i < report.repaired.size(); ++i)
    CHECK(report.repaired.candles[i].timestamp -
              report.repaired.candles[i - 1].timestamp == 3600);
}

TEST_CASE("truncate_before drops early history") {
  const CandleSeries s = oracle::series_from_closes({100, 101, 102, 103}, 1368576000 - 7200);
  const CandleSeries cut = truncate_before(s);
  REQUIRE(cut.size() == 2);
  CHECK(cut.candles[0].timestamp == 1368576000);
  CHECK(truncate_before(s, 0) == s);
}
