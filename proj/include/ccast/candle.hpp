#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ccast {

// One OHLC bar. Volume is carried through ingestion when the source provides
// it but is never fed to the model.
struct Candle {
  int64_t timestamp = 0;  // Unix seconds, bar open time
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::optional<double> volume;

  bool operator==(const Candle&) const = default;
};

struct CandleSeries {
  int64_t interval = 3600;  // seconds per bar
  std::vector<Candle> candles;

  bool empty() const { return candles.empty(); }
  size_t size() const { return candles.size(); }

  bool operator==(const CandleSeries&) const = default;
};

// Throws if prices are non-positive or the high/low bracket is inconsistent.
// `line` is included in the message when >= 0 so CSV errors point at the row.
void check_candle(const Candle& c, long line = -1);

struct SeriesValidationReport {
  std::vector<int64_t> duplicates;      // timestamps seen more than once
  std::vector<int64_t> gaps;            // each missing grid slot
  std::vector<int64_t> non_monotonic;   // timestamps that step backwards or repeat
  std::vector<int64_t> off_grid;        // timestamps not aligned to the series grid
  CandleSeries repaired;

  bool clean() const {
    return duplicates.empty() && gaps.empty() && non_monotonic.empty() && off_grid.empty();
  }
};

// Reports ordering problems, duplicates and missing bars, and builds a
// repaired copy: first occurrence wins on duplicate timestamps, bars are
// sorted ascending, off-grid bars (relative to the first timestamp) are
// dropped, and gaps are filled with flat bars at the previous close.
SeriesValidationReport validate_series(const CandleSeries& series);

// Drops all candles with timestamp < cutoff. Default cutoff removes the early
// low-liquidity BTC era that starts before 2013-05-15T00:00:00Z.
inline constexpr int64_t kDefaultHistoryCutoff = 1368576000;

CandleSeries truncate_before(const CandleSeries& series, int64_t cutoff = kDefaultHistoryCutoff);

}  // namespace ccast
