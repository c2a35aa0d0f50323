#include "ccast/backtest.hpp"

#include <cmath>

#include "ccast/error.hpp"
#include "ccast/pipeline.hpp"

namespace ccast {

double portfolio_value(const Portfolio& p, double price) {
  return p.quote_qty + p.base_qty * price;
}

std::pair<Portfolio, std::optional<Trade>> execute_signal(const Portfolio& p, Signal signal,
                                                          double price,
                                                          double expected_change,
                                                          const ExecutionRules& rules,
                                                          int64_t timestamp) {
  if (price <= 0.0) throw Error("execution price must be positive");
  if (p.base_qty < 0.0 || p.quote_qty < 0.0) throw Error("portfolio is already negative");

  if (signal == Signal::Hold) return {p, std::nullopt};
  if (rules.gain_gate_enabled && std::fabs(expected_change) <= rules.fee_rate)
    return {p, std::nullopt};

  const double value = portfolio_value(p, price);
  Portfolio next = p;
  Trade trade;
  trade.timestamp = timestamp;
  trade.side = signal;
  trade.price = price;

  if (signal == Signal::Buy) {
    const double notional = std::min(p.quote_qty, rules.max_fraction * value);
    if (notional < rules.min_trade_notional) return {p, std::nullopt};
    trade.base_qty = notional * (1.0 - rules.fee_rate) / price;
    trade.fee_paid = rules.fee_rate * notional;
    next.quote_qty = p.quote_qty - notional;
    next.base_qty = p.base_qty + trade.base_qty;
  } else {
    const double base_sold = std::min(p.base_qty, rules.max_fraction * value / price);
    const double notional = base_sold * price;
    if (notional < rules.min_trade_notional) return {p, std::nullopt};
    trade.base_qty = base_sold;
    trade.fee_paid = rules.fee_rate * notional;
    next.base_qty = p.base_qty - base_sold;
    next.quote_qty = p.quote_qty + notional * (1.0 - rules.fee_rate);
  }
  trade.value_after = portfolio_value(next, price);
  return {next, trade};
}

namespace {

// Smallest number of closes the strategy must be able to see, including the
// injected prediction when enabled.
size_t strategy_min_closes(StrategyKind kind, const StrategyConfig& cfg) {
  switch (kind) {
    case StrategyKind::rsi:
      return static_cast<size_t>(cfg.rsi_period) + 1;
    case StrategyKind::dema:
      return 2 * static_cast<size_t>(cfg.dema_long) - 1;
    case StrategyKind::macd:
      return static_cast<size_t>(cfg.macd_slow) + cfg.macd_signal;
    default:
      return 1;
  }
}

}  // namespace

BacktestResult run_backtest(const CandleSeries& series, const ModelBundle& bundle,
                            StrategyKind strategy, const StrategyConfig& cfg,
                            const ExecutionRules& rules, const BacktestOptions& opts) {
  if (opts.initial_quote <= 0.0) throw Error("initial quote must be positive");
  const auto rho = static_cast<size_t>(bundle.hyper.rho);

  // All indicator stages are causal, so the matrix can be built once up
  // front: column j of the differenced matrix only depends on candles up to
  // w0+j+1, and the window used at period t stops at column t-w0-1.
  const FeatureMatrix raw = build_features(series, bundle.indicators);
  const FeatureMatrix diff = difference(raw);
  const FeatureMatrix norm = apply_normalization(diff, bundle.stats);
  const size_t w0 = series.size() - raw.cols();  // candle index of first raw column

  size_t first_decision = w0 + rho;
  const size_t min_closes = strategy_min_closes(strategy, cfg);
  const size_t extra = cfg.inject_prediction ? 1 : 0;
  if (min_closes > extra && min_closes - extra > first_decision + 1)
    first_decision = min_closes - extra - 1;
  if (first_decision >= series.size())
    throw Error("series too short to backtest: need more than " +
                std::to_string(first_decision) + " candles");

  Portfolio portfolio{0.0, opts.initial_quote};
  Rng rng(cfg.random_seed);

  BacktestResult result;
  result.initial_quote = opts.initial_quote;
  result.first_decision_index = first_decision;
  result.curve.interval = series.interval;

  // The benchmark conversion is exempt from the trade cap and the gate; it
  // is not a prediction-driven trade.
  ExecutionRules effective = rules;
  if (strategy == StrategyKind::buyhold) {
    effective.max_fraction = 1.0;
    effective.gain_gate_enabled = false;
  }

  std::vector<double> closes;
  closes.reserve(series.size() + 1);
  for (size_t i = 0; i <= first_decision; ++i) closes.push_back(series.candles[i].close);

  for (size_t t = first_decision; t < series.size(); ++t) {
    const Candle& now = series.candles[t];
    const size_t window_first = t - w0 - rho;
    const auto y = predict_next(bundle.params, bundle.hyper, norm, window_first);
    const Candle predicted = reconstruct_prediction(y, bundle.stats, now, series.interval);
    const double expected_change = (predicted.close - now.close) / now.close;

    Signal signal = Signal::Hold;
    switch (strategy) {
      case StrategyKind::roc:
        signal = roc_signal(now.close, predicted.close, cfg);
        break;
      case StrategyKind::rsi:
      case StrategyKind::dema:
      case StrategyKind::macd: {
        if (cfg.inject_prediction) closes.push_back(predicted.close);
        if (strategy == StrategyKind::rsi)
          signal = rsi_signal(closes, cfg);
        else if (strategy == StrategyKind::dema)
          signal = dema_signal(closes, cfg);
        else
          signal = macd_signal(closes, cfg);
        if (cfg.inject_prediction) closes.pop_back();
        break;
      }
      case StrategyKind::random:
        signal = random_signal(rng);
        break;
      case StrategyKind::buyhold:
        signal = buy_and_hold_signal(t - first_decision);
        break;
    }

    auto [next, trade] =
        execute_signal(portfolio, signal, now.close, expected_change, effective, now.timestamp);
    portfolio = next;
    if (trade) {
      result.trades.push_back(*trade);
      result.total_fees += trade->fee_paid;
    }

    const double value = portfolio_value(portfolio, now.close);
    result.curve.timestamps.push_back(now.timestamp);
    result.curve.values.push_back(value);

    if (opts.record_ledger) {
      PeriodRecord rec;
      rec.timestamp = now.timestamp;
      rec.close = now.close;
      rec.predicted_close = predicted.close;
      rec.expected_change = expected_change;
      rec.signal = signal;
      rec.traded = trade.has_value();
      rec.fee_paid = trade ? trade->fee_paid : 0.0;
      rec.after = portfolio;
      rec.value = value;
      result.ledger.push_back(rec);
    }

    if (t + 1 < series.size()) closes.push_back(series.candles[t + 1].close);
  }

  result.final_value = result.curve.values.back();
  return result;
}

BacktestResult alpha_baseline(const CandleSeries& series, double initial_quote,
                              const ExecutionRules& rules) {
  if (series.empty()) throw Error("alpha baseline needs a non-empty series");
  if (initial_quote <= 0.0) throw Error("initial quote must be positive");

  BacktestResult result;
  result.initial_quote = initial_quote;
  result.curve.interval = series.interval;

  const Candle& first = series.candles.front();
  Portfolio p;
  p.base_qty = initial_quote * (1.0 - rules.fee_rate) / first.close;
  p.quote_qty = 0.0;

  Trade trade;
  trade.timestamp = first.timestamp;
  trade.side = Signal::Buy;
  trade.base_qty = p.base_qty;
  trade.price = first.close;
  trade.fee_paid = rules.fee_rate * initial_quote;
  trade.value_after = portfolio_value(p, first.close);
  result.trades.push_back(trade);
  result.total_fees = trade.fee_paid;

  for (const Candle& c : series.candles) {
    result.curve.timestamps.push_back(c.timestamp);
    result.curve.values.push_back(portfolio_value(p, c.close));
  }
  result.final_value = result.curve.values.back();
  return result;
}

std::optional<double> sharpe_from_returns(const std::vector<double>& returns,
                                          double rf_period) {
  if (returns.empty()) throw Error("sharpe of an empty return list");
  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  var /= static_cast<double>(returns.size());
  const double sd = std::sqrt(var);
  if (sd == 0.0) return std::nullopt;
  return (mean - rf_period) / sd;
}

std::vector<SharpeWindow> sharpe_by_window(const EquityCurve& curve, double rf_annual,
                                           int window_days) {
  if (curve.values.empty()) throw Error("sharpe over an empty curve");
  if (curve.interval <= 0) throw Error("curve interval must be positive");
  if (window_days < 1) throw Error("sharpe window must be at least one day");

  const int64_t window_seconds = static_cast<int64_t>(window_days) * 86400;
  if (window_seconds % curve.interval != 0)
    throw Error("sharpe window must be a whole number of curve periods");
  const size_t per_window = static_cast<size_t>(window_seconds / curve.interval);
  const size_t n_windows = curve.size() / per_window;

  const double periods_per_year = 365.0 * 86400.0 / static_cast<double>(curve.interval);
  const double rf_period = rf_annual / periods_per_year;

  std::vector<SharpeWindow> out;
  out.reserve(n_windows);
  for (size_t w = 0; w < n_windows; ++w) {
    const size_t begin = w * per_window;
    std::vector<double> returns;
    returns.reserve(per_window - 1);
    for (size_t i = begin + 1; i < begin + per_window; ++i)
      returns.push_back(curve.values[i] / curve.values[i - 1] - 1.0);
    SharpeWindow sw;
    sw.index = w;
    sw.start_timestamp = curve.timestamps[begin];
    sw.sharpe = sharpe_from_returns(returns, rf_period);
    out.push_back(sw);
  }
  return out;
}

}  // namespace ccast
