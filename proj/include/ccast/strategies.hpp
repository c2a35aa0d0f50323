#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccast/rng.hpp"

namespace ccast {

enum class Signal { Buy, Sell, Hold };

std::string to_string(Signal s);

enum class StrategyKind { roc, rsi, dema, macd, random, buyhold };

std::string to_string(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);

struct StrategyConfig {
  // roc: predicted percent change thresholds, as fractions
  double roc_upper = 0.005;
  double roc_lower = -0.005;
  // rsi
  int rsi_period = 14;
  double rsi_overbought = 70.0;
  double rsi_oversold = 30.0;
  // dema crossover
  int dema_short = 10;
  int dema_long = 21;
  // macd crossover
  int macd_fast = 12;
  int macd_slow = 26;
  int macd_signal = 9;
  // random baseline
  uint64_t random_seed = 42;
  // When false the indicator strategies see realized closes only, which
  // isolates how much of a strategy's edge comes from the forecast.
  bool inject_prediction = true;

  bool operator==(const StrategyConfig&) const = default;
};

// Buy above roc_upper, sell below roc_lower, hold between.
Signal roc_signal(double last_close, double predicted_close, const StrategyConfig& cfg);

// The series already ends with the value to judge (usually the predicted
// close). Overbought means sell, oversold means buy.
Signal rsi_signal(const std::vector<double>& closes_with_prediction,
                  const StrategyConfig& cfg);

// Acts only on a short/long crossover happening at the final step.
Signal dema_signal(const std::vector<double>& closes_with_prediction,
                   const StrategyConfig& cfg);

// Acts when the macd line crosses its signal line at the final step.
Signal macd_signal(const std::vector<double>& closes_with_prediction,
                   const StrategyConfig& cfg);

// Uniform over the three actions; the generator is owned by the caller so a
// seed fixes the whole sequence.
Signal random_signal(Rng& rng);

// Buy on the first decision step, hold forever after.
Signal buy_and_hold_signal(size_t step_index);

}  // namespace ccast
