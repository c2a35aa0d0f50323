#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccast/candle.hpp"
#include "ccast/checkpoint.hpp"
#include "ccast/strategies.hpp"

namespace ccast {

// Spot portfolio: no shorting, no leverage, both legs stay non-negative.
struct Portfolio {
  double base_qty = 0.0;   // asset being traded, e.g. BTC
  double quote_qty = 0.0;  // cash leg, e.g. USDT

  bool operator==(const Portfolio&) const = default;
};

struct ExecutionRules {
  double fee_rate = 0.001;          // taker fee on traded notional
  double max_fraction = 0.25;       // cap per trade, fraction of portfolio value
  double min_trade_notional = 10.0; // dust guard, in quote units
  // Skip trades whose predicted relative move would not even cover the fee.
  bool gain_gate_enabled = true;

  bool operator==(const ExecutionRules&) const = default;
};

struct Trade {
  int64_t timestamp = 0;
  Signal side = Signal::Hold;
  double base_qty = 0.0;  // amount bought or sold
  double price = 0.0;
  double fee_paid = 0.0;  // in quote units
  double value_after = 0.0;

  bool operator==(const Trade&) const = default;
};

struct EquityCurve {
  int64_t interval = 3600;
  std::vector<int64_t> timestamps;
  std::vector<double> values;

  size_t size() const { return values.size(); }

  bool operator==(const EquityCurve&) const = default;
};

double portfolio_value(const Portfolio& p, double price);

// Applies one signal at the given price. Buys spend
// min(quote, max_fraction * value), sells liquidate
// min(base, max_fraction * value / price); anything below the dust threshold
// or blocked by the gain gate leaves the portfolio untouched. Fees come out
// of the traded notional, and fills happen exactly at `price`.
std::pair<Portfolio, std::optional<Trade>> execute_signal(const Portfolio& p, Signal signal,
                                                          double price,
                                                          double expected_change,
                                                          const ExecutionRules& rules,
                                                          int64_t timestamp = 0);

// One row per decision period, for audits and debugging.
struct PeriodRecord {
  int64_t timestamp = 0;
  double close = 0.0;
  double predicted_close = 0.0;
  double expected_change = 0.0;
  Signal signal = Signal::Hold;
  bool traded = false;
  double fee_paid = 0.0;
  Portfolio after;
  double value = 0.0;
};

struct BacktestOptions {
  double initial_quote = 10000.0;
  bool record_ledger = false;
};

struct BacktestResult {
  EquityCurve curve;
  std::vector<Trade> trades;
  double initial_quote = 0.0;
  double final_value = 0.0;
  double total_fees = 0.0;
  size_t first_decision_index = 0;  // candle index of the first equity point
  std::vector<PeriodRecord> ledger;
};

// Walks the series one candle at a time: rebuild the feature window from
// realized candles only, predict the next bar, ask the strategy for a signal,
// execute at the current close, then mark to market. The buy-and-hold
// strategy is the benchmark conversion, so its step-0 buy is exempt from the
// per-trade cap and the gain gate (fees still apply).
BacktestResult run_backtest(const CandleSeries& series, const ModelBundle& bundle,
                            StrategyKind strategy, const StrategyConfig& cfg,
                            const ExecutionRules& rules, const BacktestOptions& opts = {});

// Converts everything to base at the first close of the series (fee per
// rules) and holds. Equals a buy-and-hold backtest over the same candles.
BacktestResult alpha_baseline(const CandleSeries& series, double initial_quote,
                              const ExecutionRules& rules);

// Mean excess return over population stddev. Windows without variance have
// no defined ratio and come back empty rather than infinite.
std::optional<double> sharpe_from_returns(const std::vector<double>& returns,
                                          double rf_period);

struct SharpeWindow {
  size_t index = 0;
  int64_t start_timestamp = 0;
  std::optional<double> sharpe;
};

// Splits the curve into complete fixed-length windows (30 days by default),
// anchored at the curve start. The risk-free rate is an annual figure
// prorated linearly to one period (365-day year).
std::vector<SharpeWindow> sharpe_by_window(const EquityCurve& curve, double rf_annual = 0.02,
                                           int window_days = 30);

}  // namespace ccast
