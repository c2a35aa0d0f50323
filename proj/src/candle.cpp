#include "ccast/candle.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "ccast/error.hpp"

namespace ccast {

namespace {

std::string at_line(long line) {
  return line >= 0 ? " at line " + std::to_string(line) : "";
}

}  // namespace

void check_candle(const Candle& c, long line) {
  if (!(c.open > 0.0 && c.high > 0.0 && c.low > 0.0 && c.close > 0.0))
    throw Error("non-positive price" + at_line(line));
  if (c.high < c.low) throw Error("high below low" + at_line(line));
  if (c.low > std::min(c.open, c.close))
    throw Error("low above open/close" + at_line(line));
  if (c.high < std::max(c.open, c.close))
    throw Error("high below open/close" + at_line(line));
  if (c.volume && *c.volume < 0.0) throw Error("negative volume" + at_line(line));
}

SeriesValidationReport validate_series(const CandleSeries& series) {
  if (series.interval <= 0) throw Error("series interval must be positive");

  SeriesValidationReport report;
  report.repaired.interval = series.interval;
  if (series.candles.empty()) return report;

  // Pass 1: flag ordering violations and duplicates as seen in input order.
  std::unordered_set<int64_t> seen;
  std::unordered_set<int64_t> dup_logged;
  for (size_t i = 0; i < series.candles.size(); ++i) {
    const int64_t ts = series.candles[i].timestamp;
    if (i > 0 && ts <= series.candles[i - 1].timestamp) report.non_monotonic.push_back(ts);
    if (!seen.insert(ts).second && dup_logged.insert(ts).second)
      report.duplicates.push_back(ts);
  }

  // Pass 2: keep the first occurrence of each timestamp, then sort.
  std::vector<Candle> kept;
  kept.reserve(series.candles.size());
  std::unordered_set<int64_t> picked;
  for (const Candle& c : series.candles)
    if (picked.insert(c.timestamp).second) kept.push_back(c);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Candle& a, const Candle& b) { return a.timestamp < b.timestamp; });

  // Pass 3: drop bars that do not sit on the grid anchored at the first bar.
  // A repaired series must step by exactly one interval, which is impossible
  // to guarantee while keeping misaligned bars.
  const int64_t anchor = kept.front().timestamp;
  std::vector<Candle> aligned;
  aligned.reserve(kept.size());
  for (const Candle& c : kept) {
    if ((c.timestamp - anchor) % series.interval != 0) {
      report.off_grid.push_back(c.timestamp);
    } else {
      aligned.push_back(c);
    }
  }

  // Pass 4: fill gaps with flat bars carried from the previous close.
  report.repaired.candles.reserve(aligned.size());
  for (size_t i = 0; i < aligned.size(); ++i) {
    if (i > 0) {
      const Candle& prev = report.repaired.candles.back();
      int64_t expected = prev.timestamp + series.interval;
      while (expected < aligned[i].timestamp) {
        report.gaps.push_back(expected);
        Candle fill;
        fill.timestamp = expected;
        fill.open = fill.high = fill.low = fill.close = prev.close;
        if (prev.volume) fill.volume = 0.0;
        report.repaired.candles.push_back(fill);
        expected += series.interval;
      }
    }
    report.repaired.candles.push_back(aligned[i]);
  }
  return report;
}

CandleSeries truncate_before(const CandleSeries& series, int64_t cutoff) {
  CandleSeries out;
  out.interval = series.interval;
  out.candles.reserve(series.candles.size());
  for (const Candle& c : series.candles)
    if (c.timestamp >= cutoff) out.candles.push_back(c);
  return out;
}

}  // namespace ccast
