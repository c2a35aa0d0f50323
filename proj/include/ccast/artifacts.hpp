#pragma once

#include <string>
#include <vector>

#include "ccast/backtest.hpp"
#include "ccast/checkpoint.hpp"
#include "ccast/pipeline.hpp"
#include "ccast/provenance.hpp"
#include "ccast/validation.hpp"

namespace ccast {

// Artifact files never contain wall-clock time, so re-running a command with
// the same inputs reproduces them byte for byte. The side file written by
// write_meta carries the creation time instead.

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Writes <artifact_path>.meta.json with provenance and creation time.
void write_meta(const std::string& artifact_path, const Provenance& prov);

// stats.json: normalization ranges plus everything preprocess learned.
std::string stats_to_json(const PipelineArtifacts& art, const IndicatorConfig& indicators,
                          const std::string& config_echo_json, const Provenance& prov);

struct StatsArtifact {
  NormalizationStats stats;
  Candle last_candle;
  int64_t interval = 3600;
  size_t stats_columns = 0;
  std::vector<std::string> stages;
  IndicatorConfig indicators;
  Provenance provenance;
};

StatsArtifact stats_from_json(const std::string& text);

// timestamp,value
std::string equity_to_csv(const EquityCurve& curve);
EquityCurve equity_from_csv(const std::string& text, int64_t fallback_interval = 3600);

// timestamp,side,base_qty,price,fee,value_after
std::string trades_to_csv(const std::vector<Trade>& trades);

// One row per cycle with per-channel error for that cycle.
std::string cv_cycles_to_csv(const CvReport& report);

// Overall per-channel error plus protocol facts, for the report command.
std::string cv_summary_to_json(const CvReport& report, const Provenance& prov);

struct CvSummary {
  int k = 1;
  size_t cycles = 0;
  std::array<double, kOhlcChannels> channel_rmse{};
};

CvSummary cv_summary_from_json(const std::string& text);

// param,value,open_rmse,high_rmse,low_rmse,close_rmse
std::string sweep_to_csv(const SweepReport& report);

std::string backtest_summary_to_json(const BacktestResult& result,
                                     const std::vector<SharpeWindow>& windows,
                                     const std::string& strategy_name,
                                     const Provenance& prov);

std::vector<SharpeWindow> sharpe_windows_from_summary_json(const std::string& text);

std::string prediction_to_json(const Candle& predicted, const Provenance& prov);

// timestamp,equity,alpha,difference; curves must share timestamps.
std::string growth_to_csv(const EquityCurve& equity, const EquityCurve& alpha);

// window,start_timestamp,sharpe (blank when undefined)
std::string sharpe_to_csv(const std::vector<SharpeWindow>& windows);

// k,open_rmse,high_rmse,low_rmse,close_rmse, one row per summary, sorted by k.
std::string rmse_vs_k_to_csv(std::vector<CvSummary> summaries);

}  // namespace ccast
