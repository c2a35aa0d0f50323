#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccast/candle.hpp"
#include "ccast/indicators.hpp"
#include "ccast/matrix.hpp"
#include "ccast/provenance.hpp"

namespace ccast {

// Feature rows, in the exact order they appear in every matrix.
inline const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "open", "high", "low",  "close",        "sma",  "ema",
      "dema", "rsi",  "roc",  "macd",         "macd_signal"};
  return names;
}
inline constexpr size_t kFeatureCount = 11;
inline constexpr size_t kOhlcChannels = 4;

// Rows are features, columns are time steps. t0 is the timestamp of the first
// column, columns advance by one interval each.
struct FeatureMatrix {
  std::vector<std::string> names;
  Mat values;
  int64_t t0 = 0;
  int64_t interval = 3600;

  size_t rows() const { return values.rows(); }
  size_t cols() const { return values.cols(); }

  bool operator==(const FeatureMatrix&) const = default;
};

// Per-row affine range, captured once on training data and frozen afterwards.
struct NormalizationStats {
  std::vector<std::string> names;
  std::vector<double> row_min;
  std::vector<double> row_max;

  size_t size() const { return row_min.size(); }

  // Maps x into [-1, 1] over the captured range. Rows with max == min map to 0.
  double normalize(size_t row, double x) const;
  // Inverse map. Degenerate rows return their captured constant.
  double denormalize(size_t row, double y) const;

  bool operator==(const NormalizationStats&) const = default;
};

// Builds the 11-row feature matrix: the four price channels plus SMA, EMA,
// DEMA, RSI, ROC, MACD and its signal line on the close. Leading columns where
// any indicator is still warming up are dropped.
FeatureMatrix build_features(const CandleSeries& series, const IndicatorConfig& cfg = {});

// out[i][t] = m[i][t+1] - m[i][t]; one column shorter, t0 advances by one
// interval so each column sits at the time the change completes.
FeatureMatrix difference(const FeatureMatrix& m);

// Undoes difference given the column that was dropped.
FeatureMatrix undifference(const FeatureMatrix& diff, const std::vector<double>& first_column,
                           int64_t t0);

NormalizationStats compute_row_stats(const FeatureMatrix& m, size_t first_cols);

FeatureMatrix apply_normalization(const FeatureMatrix& m, const NormalizationStats& stats);

// Stats over the whole matrix plus the normalized result.
std::pair<FeatureMatrix, NormalizationStats> normalize_rows(const FeatureMatrix& m);

FeatureMatrix denormalize(const FeatureMatrix& m, const NormalizationStats& stats);

// Turns a normalized OHLC diff prediction back into a price-space candle one
// interval after last_candle. Uses the first four stats rows.
Candle reconstruct_prediction(const std::array<double, kOhlcChannels>& y_norm,
                              const NormalizationStats& stats, const Candle& last_candle,
                              int64_t interval);

// Contiguous prefix/suffix split by column count. Throws if either side
// would be empty.
std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& m, double ratio);

size_t split_point(size_t cols, double ratio);

// Everything preprocess produces. The stage list is written into stats
// artifacts so downstream tools can verify the transform order they consume.
struct PipelineArtifacts {
  FeatureMatrix normalized;
  NormalizationStats stats;
  Candle last_raw_candle;
  int64_t interval = 3600;
  size_t stats_columns = 0;  // how many leading columns defined the stats
  std::vector<std::string> stages;
};

inline const std::vector<std::string>& pipeline_stages() {
  static const std::vector<std::string> stages = {"indicators", "difference", "normalize"};
  return stages;
}

// indicators -> difference -> normalize, with stats frozen on the first
// train_fraction of the differenced columns.
PipelineArtifacts run_pipeline(const CandleSeries& series, const IndicatorConfig& cfg,
                               double train_fraction);

// Binary matrix file round trip (layout documented in the README).
void save_matrix(const FeatureMatrix& m, const std::string& path, const Provenance& prov = {});
FeatureMatrix load_matrix(const std::string& path, Provenance* prov = nullptr);

}  // namespace ccast
