#pragma once

#include <vector>

namespace ccast {

// Every indicator returns a series aligned 1:1 with its input. Positions that
// fall inside the warm-up of the indicator are NaN, never zero, so downstream
// code can tell "no value yet" from "value is zero".

struct IndicatorConfig {
  int sma_period = 10;
  int ema_period = 10;
  int dema_period = 10;
  int rsi_period = 14;
  int roc_period = 1;
  int macd_fast = 12;
  int macd_slow = 26;
  int macd_signal = 9;

  bool operator==(const IndicatorConfig&) const = default;
};

// Arithmetic mean of the trailing n values. Defined from index n-1.
std::vector<double> sma(const std::vector<double>& values, int n);

// Seeded with the SMA of the first n values at index n-1, then the standard
// alpha = 2/(n+1) recurrence. Defined from index n-1.
std::vector<double> ema(const std::vector<double>& values, int n);

// 2*ema - ema(ema), which doubles the warm-up: defined from index 2n-2.
std::vector<double> dema(const std::vector<double>& values, int n);

// Wilder's smoothing. The first average gain/loss is a simple mean of the
// first n changes, so values are defined from index n. All-loss windows give
// exactly 0, all-gain windows exactly 100, a flat window reads as neutral 50.
std::vector<double> rsi(const std::vector<double>& values, int n);

// Percent change against the value n steps back. Defined from index n.
std::vector<double> roc(const std::vector<double>& values, int n);

struct MacdResult {
  std::vector<double> macd_line;    // ema(fast) - ema(slow), defined from slow-1
  std::vector<double> signal_line;  // ema of macd_line, defined from slow+signal-2
  std::vector<double> histogram;    // macd_line - signal_line
};

MacdResult macd(const std::vector<double>& values, int fast, int slow, int signal);

}  // namespace ccast
