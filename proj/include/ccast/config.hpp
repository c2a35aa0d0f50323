#pragma once

#include <cstdint>
#include <string>

#include "ccast/backtest.hpp"
#include "ccast/candle.hpp"
#include "ccast/indicators.hpp"
#include "ccast/network.hpp"
#include "ccast/strategies.hpp"
#include "ccast/validation.hpp"

namespace ccast {

struct DataConfig {
  std::string pair = "BTC/USDT";
  int64_t interval = 3600;
  int64_t cutoff = kDefaultHistoryCutoff;
  std::string endpoint;  // base URL for `ingest --pair`

  bool operator==(const DataConfig&) const = default;
};

struct BacktestSettings {
  double initial_quote = 10000.0;
  double rf_annual = 0.02;
  int sharpe_window_days = 30;

  bool operator==(const BacktestSettings&) const = default;
};

// The one configuration object every command consumes. A JSON config file
// may set any subset; unknown keys are rejected so typos cannot silently
// fall back to defaults. Command-line flags override file values.
struct EngineConfig {
  uint64_t seed = 42;
  DataConfig data;
  IndicatorConfig indicators;
  Hyperparameters network;
  CvConfig cv;
  StrategyKind strategy = StrategyKind::roc;
  StrategyConfig strategy_cfg;
  ExecutionRules rules;
  BacktestSettings backtest;

  bool operator==(const EngineConfig&) const = default;
};

// Parses and validates a config JSON document. Every value is optional;
// unknown keys anywhere are an error. The seed is propagated into the
// network and strategy sub-configs.
EngineConfig parse_config(const std::string& json_text);
EngineConfig load_config_file(const std::string& path);

// Canonical serialization of the effective config: stable key order, every
// field present. Artifacts echo this.
std::string config_to_json(const EngineConfig& cfg);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const EngineConfig& cfg);

// Re-applies the seed to the sub-configs that carry their own copy.
void propagate_seed(EngineConfig& cfg);

// Standalone rules file: same keys as the config "rules" section.
ExecutionRules parse_rules_json(const std::string& json_text);

}  // namespace ccast
