#include "ccast/strategies.hpp"

#include <cmath>

#include "ccast/error.hpp"
#include "ccast/indicators.hpp"

namespace ccast {

std::string to_string(Signal s) {
  switch (s) {
    case Signal::Buy: return "buy";
    case Signal::Sell: return "sell";
    default: return "hold";
  }
}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::roc: return "roc";
    case StrategyKind::rsi: return "rsi";
    case StrategyKind::dema: return "dema";
    case StrategyKind::macd: return "macd";
    case StrategyKind::random: return "random";
    default: return "buyhold";
  }
}

StrategyKind strategy_from_name(const std::string& name) {
  if (name == "roc") return StrategyKind::roc;
  if (name == "rsi") return StrategyKind::rsi;
  if (name == "dema") return StrategyKind::dema;
  if (name == "macd") return StrategyKind::macd;
  if (name == "random") return StrategyKind::random;
  if (name == "buyhold") return StrategyKind::buyhold;
  throw Error("unknown strategy: " + name);
}

Signal roc_signal(double last_close, double predicted_close, const StrategyConfig& cfg) {
  if (last_close <= 0.0) throw Error("roc signal needs a positive last close");
  const double r = (predicted_close - last_close) / last_close;
  if (r > cfg.roc_upper) return Signal::Buy;
  if (r < cfg.roc_lower) return Signal::Sell;
  return Signal::Hold;
}

Signal rsi_signal(const std::vector<double>& closes_with_prediction,
                  const StrategyConfig& cfg) {
  const auto values = rsi(closes_with_prediction, cfg.rsi_period);
  const double last = values.back();
  if (last >= cfg.rsi_overbought) return Signal::Sell;
  if (last <= cfg.rsi_oversold) return Signal::Buy;
  return Signal::Hold;
}

namespace {

// Crossover of two aligned series at the final step. NaNs at the comparison
// points mean "not enough history yet", which is a Hold.
Signal crossover_at_end(const std::vector<double>& fast, const std::vector<double>& slow) {
  const size_t n = fast.size();
  if (n < 2) return Signal::Hold;
  const double prev = fast[n - 2] - slow[n - 2];
  const double last = fast[n - 1] - slow[n - 1];
  if (std::isnan(prev) || std::isnan(last)) return Signal::Hold;
  if (prev <= 0.0 && last > 0.0) return Signal::Buy;
  if (prev >= 0.0 && last < 0.0) return Signal::Sell;
  return Signal::Hold;
}

}  // namespace

Signal dema_signal(const std::vector<double>& closes_with_prediction,
                   const StrategyConfig& cfg) {
  if (cfg.dema_short >= cfg.dema_long)
    throw Error("dema strategy needs dema_short < dema_long");
  const size_t needed = 2 * static_cast<size_t>(cfg.dema_long) - 1;
  if (closes_with_prediction.size() < needed)
    throw Error("dema strategy needs at least " + std::to_string(needed) + " closes");
  return crossover_at_end(dema(closes_with_prediction, cfg.dema_short),
                          dema(closes_with_prediction, cfg.dema_long));
}

Signal macd_signal(const std::vector<double>& closes_with_prediction,
                   const StrategyConfig& cfg) {
  const MacdResult r =
      macd(closes_with_prediction, cfg.macd_fast, cfg.macd_slow, cfg.macd_signal);
  return crossover_at_end(r.macd_line, r.signal_line);
}

Signal random_signal(Rng& rng) {
  switch (rng.next_below(3)) {
    case 0: return Signal::Buy;
    case 1: return Signal::Sell;
    default: return Signal::Hold;
  }
}

Signal buy_and_hold_signal(size_t step_index) {
  return step_index == 0 ? Signal::Buy : Signal::Hold;
}

}  // namespace ccast
