#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ccast/pipeline.hpp"
#include "ccast/training.hpp"

namespace ccast {

enum class RetrainMode { from_scratch, warm_start };

std::string to_string(RetrainMode mode);
RetrainMode retrain_mode_from_string(const std::string& name);

struct CvConfig {
  int k = 1;                 // predictions revealed per cycle
  double split_ratio = 0.8;  // leading fraction used as the initial train set
  RetrainMode retrain_mode = RetrainMode::from_scratch;

  bool operator==(const CvConfig&) const = default;
};

// One record per column that was read while producing a prediction, so tests
// can prove nothing in the future of the predicted column was touched.
struct ColumnAccess {
  size_t predicted_column;
  size_t first_read;
  size_t last_read;  // inclusive
  bool training;     // read happened while fitting, not while predicting
};

using CvAudit = std::vector<ColumnAccess>;

struct CvCycle {
  size_t index = 0;
  size_t first_column = 0;                   // first predicted column
  size_t predictions = 0;
  std::array<double, kOhlcChannels> rmse{};  // price-space, this cycle only
};

struct CvReport {
  int k = 1;
  size_t train_columns = 0;  // p: initial training width
  size_t validation_columns = 0;  // q
  std::vector<CvCycle> cycles;
  // One entry per predicted column: absolute error per price channel, in
  // price space (normalization undone).
  std::vector<std::array<double, kOhlcChannels>> abs_errors;
  std::array<double, kOhlcChannels> channel_rmse{};
};

double rmse(const std::vector<double>& errors);

// Fits on columns [0, train_end); called once per cycle.
using TrainHook = std::function<void(size_t train_end)>;
// Predicts the normalized price-channel values of `column`; may read columns
// strictly before it.
using PredictHook = std::function<std::array<double, kOhlcChannels>(size_t column)>;

// The protocol shared by the real cross-validation and the test oracles:
// split at split_ratio, then reveal k validation columns per cycle, fitting
// on everything before them and recording denormalized absolute errors.
// Cycle count is always ceil(q / k).
CvReport run_walk_forward(const FeatureMatrix& m, const NormalizationStats& stats,
                          const CvConfig& cv, const TrainHook& fit,
                          const PredictHook& predict, CvAudit* audit = nullptr);

// Walk-forward evaluation of the recurrent network. from_scratch re-inits and
// retrains every cycle with the same seed; warm_start keeps the weights and
// lets early stopping decide how much extra fitting each cycle needs.
CvReport tskcv(const FeatureMatrix& m, const NormalizationStats& stats,
               const Hyperparameters& h, const CvConfig& cv, CvAudit* audit = nullptr);

struct SweepPoint {
  double value = 0.0;
  std::array<double, kOhlcChannels> channel_rmse{};
};

struct SweepReport {
  std::string param;
  std::vector<SweepPoint> points;
};

// Runs tskcv once per grid value of `param` (one of init_range,
// learning_rate, rho, hidden_dim). Each grid point gets its own
// deterministically derived seed and they are evaluated in parallel.
SweepReport sweep(const FeatureMatrix& m, const NormalizationStats& stats,
                  const Hyperparameters& base, const CvConfig& cv, const std::string& param,
                  const std::vector<double>& grid);

}  // namespace ccast
