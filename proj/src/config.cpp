#include "ccast/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ccast/error.hpp"
#include "ccast/timeutil.hpp"

namespace ccast {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& section) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key))
      throw Error("unknown config key: " + (section.empty() ? key : section + "." + key));
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

int64_t read_cutoff(const json& j) {
  const json& v = j.at("cutoff");
  if (v.is_string()) return parse_iso8601_utc(v.get<std::string>());
  if (v.is_number()) return v.get<int64_t>();
  throw Error("config data.cutoff must be an ISO-8601 string or Unix seconds");
}

}  // namespace

EngineConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("config root must be a JSON object");

  EngineConfig cfg;
  reject_unknown(j, {"seed", "data", "indicators", "network", "cv", "strategy", "rules",
                     "backtest"},
                 "");
  read(j, "seed", cfg.seed);

  if (j.contains("data")) {
    const json& d = j["data"];
    reject_unknown(d, {"pair", "interval", "cutoff", "endpoint"}, "data");
    read(d, "pair", cfg.data.pair);
    read(d, "interval", cfg.data.interval);
    if (d.contains("cutoff")) cfg.data.cutoff = read_cutoff(d);
    read(d, "endpoint", cfg.data.endpoint);
    if (cfg.data.interval <= 0) throw Error("config data.interval must be positive");
  }

  if (j.contains("indicators")) {
    const json& d = j["indicators"];
    reject_unknown(d,
                   {"sma_period", "ema_period", "dema_period", "rsi_period", "roc_period",
                    "macd_fast", "macd_slow", "macd_signal"},
                   "indicators");
    read(d, "sma_period", cfg.indicators.sma_period);
    read(d, "ema_period", cfg.indicators.ema_period);
    read(d, "dema_period", cfg.indicators.dema_period);
    read(d, "rsi_period", cfg.indicators.rsi_period);
    read(d, "roc_period", cfg.indicators.roc_period);
    read(d, "macd_fast", cfg.indicators.macd_fast);
    read(d, "macd_slow", cfg.indicators.macd_slow);
    read(d, "macd_signal", cfg.indicators.macd_signal);
  }

  if (j.contains("network")) {
    const json& d = j["network"];
    reject_unknown(d,
                   {"hidden_dim", "rho", "learning_rate", "beta1", "beta2", "epsilon",
                    "init_range", "max_epochs", "early_stop_delta", "early_stop_patience",
                    "cell_form", "carry_state_across_epochs"},
                   "network");
    read(d, "hidden_dim", cfg.network.hidden_dim);
    read(d, "rho", cfg.network.rho);
    read(d, "learning_rate", cfg.network.learning_rate);
    read(d, "beta1", cfg.network.beta1);
    read(d, "beta2", cfg.network.beta2);
    read(d, "epsilon", cfg.network.epsilon);
    read(d, "init_range", cfg.network.init_range);
    read(d, "max_epochs", cfg.network.max_epochs);
    read(d, "early_stop_delta", cfg.network.early_stop_delta);
    read(d, "early_stop_patience", cfg.network.early_stop_patience);
    if (d.contains("cell_form"))
      cfg.network.cell_form = cell_form_from_string(d["cell_form"].get<std::string>());
    read(d, "carry_state_across_epochs", cfg.network.carry_state_across_epochs);
  }

  if (j.contains("cv")) {
    const json& d = j["cv"];
    reject_unknown(d, {"k", "split_ratio", "retrain_mode"}, "cv");
    read(d, "k", cfg.cv.k);
    read(d, "split_ratio", cfg.cv.split_ratio);
    if (d.contains("retrain_mode"))
      cfg.cv.retrain_mode = retrain_mode_from_string(d["retrain_mode"].get<std::string>());
  }

  if (j.contains("strategy")) {
    const json& d = j["strategy"];
    reject_unknown(d,
                   {"name", "roc_upper", "roc_lower", "rsi_period", "rsi_overbought",
                    "rsi_oversold", "dema_short", "dema_long", "macd_fast", "macd_slow",
                    "macd_signal", "inject_prediction"},
                   "strategy");
    if (d.contains("name")) cfg.strategy = strategy_from_name(d["name"].get<std::string>());
    read(d, "roc_upper", cfg.strategy_cfg.roc_upper);
    read(d, "roc_lower", cfg.strategy_cfg.roc_lower);
    read(d, "rsi_period", cfg.strategy_cfg.rsi_period);
    read(d, "rsi_overbought", cfg.strategy_cfg.rsi_overbought);
    read(d, "rsi_oversold", cfg.strategy_cfg.rsi_oversold);
    read(d, "dema_short", cfg.strategy_cfg.dema_short);
    read(d, "dema_long", cfg.strategy_cfg.dema_long);
    read(d, "macd_fast", cfg.strategy_cfg.macd_fast);
    read(d, "macd_slow", cfg.strategy_cfg.macd_slow);
    read(d, "macd_signal", cfg.strategy_cfg.macd_signal);
    read(d, "inject_prediction", cfg.strategy_cfg.inject_prediction);
  }

  if (j.contains("rules")) {
    const json& d = j["rules"];
    reject_unknown(d, {"fee_rate", "max_fraction", "min_trade_notional", "gain_gate_enabled"},
                   "rules");
    read(d, "fee_rate", cfg.rules.fee_rate);
    read(d, "max_fraction", cfg.rules.max_fraction);
    read(d, "min_trade_notional", cfg.rules.min_trade_notional);
    read(d, "gain_gate_enabled", cfg.rules.gain_gate_enabled);
  }

  if (j.contains("backtest")) {
    const json& d = j["backtest"];
    reject_unknown(d, {"initial_quote", "rf_annual", "sharpe_window_days"}, "backtest");
    read(d, "initial_quote", cfg.backtest.initial_quote);
    read(d, "rf_annual", cfg.backtest.rf_annual);
    read(d, "sharpe_window_days", cfg.backtest.sharpe_window_days);
  }

  propagate_seed(cfg);
  return cfg;
}

EngineConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void propagate_seed(EngineConfig& cfg) {
  cfg.network.seed = cfg.seed;
  cfg.strategy_cfg.random_seed = cfg.seed;
}

std::string config_to_json(const EngineConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["data"] = {{"pair", cfg.data.pair},
               {"interval", cfg.data.interval},
               {"cutoff", cfg.data.cutoff},
               {"endpoint", cfg.data.endpoint}};
  j["indicators"] = {{"sma_period", cfg.indicators.sma_period},
                     {"ema_period", cfg.indicators.ema_period},
                     {"dema_period", cfg.indicators.dema_period},
                     {"rsi_period", cfg.indicators.rsi_period},
                     {"roc_period", cfg.indicators.roc_period},
                     {"macd_fast", cfg.indicators.macd_fast},
                     {"macd_slow", cfg.indicators.macd_slow},
                     {"macd_signal", cfg.indicators.macd_signal}};
  j["network"] = {{"hidden_dim", cfg.network.hidden_dim},
                  {"rho", cfg.network.rho},
                  {"learning_rate", cfg.network.learning_rate},
                  {"beta1", cfg.network.beta1},
                  {"beta2", cfg.network.beta2},
                  {"epsilon", cfg.network.epsilon},
                  {"init_range", cfg.network.init_range},
                  {"max_epochs", cfg.network.max_epochs},
                  {"early_stop_delta", cfg.network.early_stop_delta},
                  {"early_stop_patience", cfg.network.early_stop_patience},
                  {"cell_form", to_string(cfg.network.cell_form)},
                  {"carry_state_across_epochs", cfg.network.carry_state_across_epochs}};
  j["cv"] = {{"k", cfg.cv.k},
             {"split_ratio", cfg.cv.split_ratio},
             {"retrain_mode", to_string(cfg.cv.retrain_mode)}};
  j["strategy"] = {{"name", to_string(cfg.strategy)},
                   {"roc_upper", cfg.strategy_cfg.roc_upper},
                   {"roc_lower", cfg.strategy_cfg.roc_lower},
                   {"rsi_period", cfg.strategy_cfg.rsi_period},
                   {"rsi_overbought", cfg.strategy_cfg.rsi_overbought},
                   {"rsi_oversold", cfg.strategy_cfg.rsi_oversold},
                   {"dema_short", cfg.strategy_cfg.dema_short},
                   {"dema_long", cfg.strategy_cfg.dema_long},
                   {"macd_fast", cfg.strategy_cfg.macd_fast},
                   {"macd_slow", cfg.strategy_cfg.macd_slow},
                   {"macd_signal", cfg.strategy_cfg.macd_signal},
                   {"inject_prediction", cfg.strategy_cfg.inject_prediction}};
  j["rules"] = {{"fee_rate", cfg.rules.fee_rate},
                {"max_fraction", cfg.rules.max_fraction},
                {"min_trade_notional", cfg.rules.min_trade_notional},
                {"gain_gate_enabled", cfg.rules.gain_gate_enabled}};
  j["backtest"] = {{"initial_quote", cfg.backtest.initial_quote},
                   {"rf_annual", cfg.backtest.rf_annual},
                   {"sharpe_window_days", cfg.backtest.sharpe_window_days}};
  return j.dump(2) + "\n";
}

ExecutionRules parse_rules_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("rules file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error("rules file root must be a JSON object");
  reject_unknown(j, {"fee_rate", "max_fraction", "min_trade_notional", "gain_gate_enabled"},
                 "rules");
  ExecutionRules rules;
  read(j, "fee_rate", rules.fee_rate);
  read(j, "max_fraction", rules.max_fraction);
  read(j, "min_trade_notional", rules.min_trade_notional);
  read(j, "gain_gate_enabled", rules.gain_gate_enabled);
  return rules;
}

std::string config_hash(const EngineConfig& cfg) {
  const std::string text = config_to_json(cfg);
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace ccast
