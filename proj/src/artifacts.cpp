#include "ccast/artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccast/csv.hpp"
#include "ccast/error.hpp"
#include "ccast/timeutil.hpp"

namespace ccast {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(std::string("artifact missing field '") + key + "' in " + where);
  return *it;
}

json provenance_to_json(const Provenance& prov) {
  return json{{"config_hash", prov.config_hash}, {"seed", prov.seed}};
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  p.config_hash = require(j, "config_hash", "provenance").get<std::string>();
  p.seed = require(j, "seed", "provenance").get<uint64_t>();
  return p;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
  if (!out) throw Error("failed writing file: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_meta(const std::string& artifact_path, const Provenance& prov) {
  const auto now = std::chrono::system_clock::now();
  const int64_t unix_now =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  json j;
  j["artifact"] = artifact_path;
  j["config_hash"] = prov.config_hash;
  j["seed"] = prov.seed;
  j["created_at"] = format_iso8601_utc(unix_now);
  write_text_file(artifact_path + ".meta.json", j.dump(2) + "\n");
}

inline constexpr int kStatsSchemaVersion = 1;

std::string stats_to_json(const PipelineArtifacts& art, const IndicatorConfig& indicators,
                          const std::string& config_echo_json, const Provenance& prov) {
  json j;
  j["schema_version"] = kStatsSchemaVersion;
  j["feature_names"] = art.stats.names;
  j["min"] = art.stats.row_min;
  j["max"] = art.stats.row_max;
  j["stats_columns"] = art.stats_columns;
  j["pipeline"] = art.stages;
  j["interval"] = art.interval;
  json lc{{"timestamp", art.last_raw_candle.timestamp},
          {"open", art.last_raw_candle.open},
          {"high", art.last_raw_candle.high},
          {"low", art.last_raw_candle.low},
          {"close", art.last_raw_candle.close}};
  if (art.last_raw_candle.volume) lc["volume"] = *art.last_raw_candle.volume;
  j["last_candle"] = lc;
  j["indicators"] = {{"sma_period", indicators.sma_period},
                     {"ema_period", indicators.ema_period},
                     {"dema_period", indicators.dema_period},
                     {"rsi_period", indicators.rsi_period},
                     {"roc_period", indicators.roc_period},
                     {"macd_fast", indicators.macd_fast},
                     {"macd_slow", indicators.macd_slow},
                     {"macd_signal", indicators.macd_signal}};
  if (!config_echo_json.empty()) j["config"] = json::parse(config_echo_json);
  j["provenance"] = provenance_to_json(prov);
  return j.dump(2) + "\n";
}

StatsArtifact stats_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("stats artifact is not valid JSON: ") + e.what());
  }
  const int version = require(j, "schema_version", "stats").get<int>();
  if (version != kStatsSchemaVersion)
    throw Error("stats schema version " + std::to_string(version) + " is not supported");

  StatsArtifact art;
  art.stats.names = require(j, "feature_names", "stats").get<std::vector<std::string>>();
  art.stats.row_min = require(j, "min", "stats").get<Vec>();
  art.stats.row_max = require(j, "max", "stats").get<Vec>();
  if (art.stats.row_min.size() != art.stats.row_max.size())
    throw Error("stats min/max length mismatch");
  art.stats_columns = require(j, "stats_columns", "stats").get<size_t>();
  art.stages = require(j, "pipeline", "stats").get<std::vector<std::string>>();
  art.interval = require(j, "interval", "stats").get<int64_t>();

  const json& lc = require(j, "last_candle", "stats");
  art.last_candle.timestamp = require(lc, "timestamp", "last_candle").get<int64_t>();
  art.last_candle.open = require(lc, "open", "last_candle").get<double>();
  art.last_candle.high = require(lc, "high", "last_candle").get<double>();
  art.last_candle.low = require(lc, "low", "last_candle").get<double>();
  art.last_candle.close = require(lc, "close", "last_candle").get<double>();
  if (lc.contains("volume")) art.last_candle.volume = lc["volume"].get<double>();

  const json& ind = require(j, "indicators", "stats");
  art.indicators.sma_period = require(ind, "sma_period", "indicators").get<int>();
  art.indicators.ema_period = require(ind, "ema_period", "indicators").get<int>();
  art.indicators.dema_period = require(ind, "dema_period", "indicators").get<int>();
  art.indicators.rsi_period = require(ind, "rsi_period", "indicators").get<int>();
  art.indicators.roc_period = require(ind, "roc_period", "indicators").get<int>();
  art.indicators.macd_fast = require(ind, "macd_fast", "indicators").get<int>();
  art.indicators.macd_slow = require(ind, "macd_slow", "indicators").get<int>();
  art.indicators.macd_signal = require(ind, "macd_signal", "indicators").get<int>();

  art.provenance = provenance_from_json(require(j, "provenance", "stats"));
  return art;
}

std::string equity_to_csv(const EquityCurve& curve) {
  std::string out = "timestamp,value\n";
  for (size_t i = 0; i < curve.size(); ++i) {
    out += std::to_string(curve.timestamps[i]);
    out += ',';
    out += format_double(curve.values[i]);
    out += '\n';
  }
  return out;
}

EquityCurve equity_from_csv(const std::string& text, int64_t fallback_interval) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty equity CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,value") throw Error("unrecognized equity CSV header: " + line);

  EquityCurve curve;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw Error("expected 2 fields at line " + std::to_string(line_no));
    int64_t ts = 0;
    auto [p1, e1] = std::from_chars(line.data(), line.data() + comma, ts);
    double value = 0.0;
    auto [p2, e2] =
        std::from_chars(line.data() + comma + 1, line.data() + line.size(), value);
    if (e1 != std::errc() || p1 != line.data() + comma || e2 != std::errc() ||
        p2 != line.data() + line.size())
      throw Error("malformed equity row at line " + std::to_string(line_no));
    curve.timestamps.push_back(ts);
    curve.values.push_back(value);
  }
  if (curve.values.empty()) throw Error("equity CSV has a header but no rows");
  curve.interval =
      curve.size() > 1 ? curve.timestamps[1] - curve.timestamps[0] : fallback_interval;
  return curve;
}

std::string trades_to_csv(const std::vector<Trade>& trades) {
  std::string out = "timestamp,side,base_qty,price,fee,value_after\n";
  for (const Trade& t : trades) {
    out += std::to_string(t.timestamp);
    out += ',';
    out += to_string(t.side);
    out += ',';
    out += format_double(t.base_qty);
    out += ',';
    out += format_double(t.price);
    out += ',';
    out += format_double(t.fee_paid);
    out += ',';
    out += format_double(t.value_after);
    out += '\n';
  }
  return out;
}

std::string cv_cycles_to_csv(const CvReport& report) {
  std::string out = "cycle,first_column,predictions,open_rmse,high_rmse,low_rmse,close_rmse\n";
  for (const CvCycle& c : report.cycles) {
    out += std::to_string(c.index);
    out += ',';
    out += std::to_string(c.first_column);
    out += ',';
    out += std::to_string(c.predictions);
    for (double v : c.rmse) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string cv_summary_to_json(const CvReport& report, const Provenance& prov) {
  json j;
  j["k"] = report.k;
  j["cycles"] = report.cycles.size();
  j["train_columns"] = report.train_columns;
  j["validation_columns"] = report.validation_columns;
  j["channel_rmse"] = {{"open", report.channel_rmse[0]},
                       {"high", report.channel_rmse[1]},
                       {"low", report.channel_rmse[2]},
                       {"close", report.channel_rmse[3]}};
  j["provenance"] = provenance_to_json(prov);
  return j.dump(2) + "\n";
}

CvSummary cv_summary_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("cv summary is not valid JSON: ") + e.what());
  }
  CvSummary s;
  s.k = require(j, "k", "cv summary").get<int>();
  s.cycles = require(j, "cycles", "cv summary").get<size_t>();
  const json& rmse = require(j, "channel_rmse", "cv summary");
  s.channel_rmse[0] = require(rmse, "open", "channel_rmse").get<double>();
  s.channel_rmse[1] = require(rmse, "high", "channel_rmse").get<double>();
  s.channel_rmse[2] = require(rmse, "low", "channel_rmse").get<double>();
  s.channel_rmse[3] = require(rmse, "close", "channel_rmse").get<double>();
  return s;
}

std::string sweep_to_csv(const SweepReport& report) {
  std::string out = "param,value,open_rmse,high_rmse,low_rmse,close_rmse\n";
  for (const SweepPoint& p : report.points) {
    out += report.param;
    out += ',';
    out += format_double(p.value);
    for (double v : p.channel_rmse) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string backtest_summary_to_json(const BacktestResult& result,
                                     const std::vector<SharpeWindow>& windows,
                                     const std::string& strategy_name,
                                     const Provenance& prov) {
  json j;
  j["strategy"] = strategy_name;
  j["initial_quote"] = result.initial_quote;
  j["final_value"] = result.final_value;
  j["n_trades"] = result.trades.size();
  j["total_fees"] = result.total_fees;
  json sharpe = json::array();
  for (const SharpeWindow& w : windows) {
    json row;
    row["window"] = w.index;
    row["start_timestamp"] = w.start_timestamp;
    row["sharpe"] = w.sharpe ? json(*w.sharpe) : json(nullptr);
    sharpe.push_back(row);
  }
  j["sharpe_windows"] = sharpe;
  j["provenance"] = provenance_to_json(prov);
  return j.dump(2) + "\n";
}

std::vector<SharpeWindow> sharpe_windows_from_summary_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("backtest summary is not valid JSON: ") + e.what());
  }
  const json& rows = require(j, "sharpe_windows", "backtest summary");
  std::vector<SharpeWindow> out;
  for (const json& row : rows) {
    SharpeWindow w;
    w.index = require(row, "window", "sharpe_windows").get<size_t>();
    w.start_timestamp = require(row, "start_timestamp", "sharpe_windows").get<int64_t>();
    const json& s = require(row, "sharpe", "sharpe_windows");
    if (!s.is_null()) w.sharpe = s.get<double>();
    out.push_back(w);
  }
  return out;
}

std::string prediction_to_json(const Candle& predicted, const Provenance& prov) {
  json j;
  j["timestamp"] = predicted.timestamp;
  j["open"] = predicted.open;
  j["high"] = predicted.high;
  j["low"] = predicted.low;
  j["close"] = predicted.close;
  j["provenance"] = provenance_to_json(prov);
  return j.dump(2) + "\n";
}

std::string growth_to_csv(const EquityCurve& equity, const EquityCurve& alpha) {
  if (equity.size() != alpha.size())
    throw Error("equity and alpha curves differ in length: " + std::to_string(equity.size()) +
                " vs " + std::to_string(alpha.size()));
  std::string out = "timestamp,equity,alpha,difference\n";
  for (size_t i = 0; i < equity.size(); ++i) {
    if (equity.timestamps[i] != alpha.timestamps[i])
      throw Error("equity and alpha timestamps diverge at row " + std::to_string(i));
    out += std::to_string(equity.timestamps[i]);
    out += ',';
    out += format_double(equity.values[i]);
    out += ',';
    out += format_double(alpha.values[i]);
    out += ',';
    out += format_double(equity.values[i] - alpha.values[i]);
    out += '\n';
  }
  return out;
}

std::string sharpe_to_csv(const std::vector<SharpeWindow>& windows) {
  std::string out = "window,start_timestamp,sharpe\n";
  for (const SharpeWindow& w : windows) {
    out += std::to_string(w.index);
    out += ',';
    out += std::to_string(w.start_timestamp);
    out += ',';
    if (w.sharpe) out += format_double(*w.sharpe);
    out += '\n';
  }
  return out;
}

std::string rmse_vs_k_to_csv(std::vector<CvSummary> summaries) {
  std::sort(summaries.begin(), summaries.end(),
            [](const CvSummary& a, const CvSummary& b) { return a.k < b.k; });
  std::string out = "k,open_rmse,high_rmse,low_rmse,close_rmse\n";
  for (const CvSummary& s : summaries) {
    out += std::to_string(s.k);
    for (double v : s.channel_rmse) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ccast
