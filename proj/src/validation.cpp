#include "ccast/validation.hpp"

#include <cmath>
#include <future>
#include <thread>

#include "ccast/error.hpp"
#include "ccast/rng.hpp"

namespace ccast {

std::string to_string(RetrainMode mode) {
  return mode == RetrainMode::from_scratch ? "from_scratch" : "warm_start";
}

RetrainMode retrain_mode_from_string(const std::string& name) {
  if (name == "from_scratch") return RetrainMode::from_scratch;
  if (name == "warm_start") return RetrainMode::warm_start;
  throw Error("unknown retrain mode: " + name);
}

double rmse(const std::vector<double>& errors) {
  if (errors.empty()) throw Error("rmse of an empty error list");
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

CvReport run_walk_forward(const FeatureMatrix& m, const NormalizationStats& stats,
                          const CvConfig& cv, const TrainHook& fit,
                          const PredictHook& predict, CvAudit* audit) {
  if (stats.size() < kOhlcChannels)
    throw Error("walk-forward needs stats for the four price channels");
  if (cv.k < 1) throw Error("cv k must be >= 1");

  const size_t p = split_point(m.cols(), cv.split_ratio);
  const size_t q = m.cols() - p;
  if (static_cast<size_t>(cv.k) > q)
    throw Error("cv k = " + std::to_string(cv.k) + " exceeds the " + std::to_string(q) +
                " validation columns");

  CvReport report;
  report.k = cv.k;
  report.train_columns = p;
  report.validation_columns = q;

  std::array<std::vector<double>, kOhlcChannels> all_errors;
  size_t next = p;
  while (next < m.cols()) {
    CvCycle cycle;
    cycle.index = report.cycles.size();
    cycle.first_column = next;
    fit(next);
    if (audit && next > 0)
      audit->push_back({next, 0, next - 1, true});

    std::array<std::vector<double>, kOhlcChannels> cycle_errors;
    const size_t stop = std::min(next + static_cast<size_t>(cv.k), m.cols());
    for (size_t col = next; col < stop; ++col) {
      const auto pred = predict(col);
      std::array<double, kOhlcChannels> err{};
      for (size_t ch = 0; ch < kOhlcChannels; ++ch) {
        const double predicted = stats.denormalize(ch, pred[ch]);
        const double actual = stats.denormalize(ch, m.values(ch, col));
        err[ch] = std::fabs(predicted - actual);
        cycle_errors[ch].push_back(err[ch]);
        all_errors[ch].push_back(err[ch]);
      }
      report.abs_errors.push_back(err);
      ++cycle.predictions;
    }
    for (size_t ch = 0; ch < kOhlcChannels; ++ch) cycle.rmse[ch] = rmse(cycle_errors[ch]);
    report.cycles.push_back(cycle);
    next = stop;
  }
  for (size_t ch = 0; ch < kOhlcChannels; ++ch)
    report.channel_rmse[ch] = rmse(all_errors[ch]);
  return report;
}

CvReport tskcv(const FeatureMatrix& m, const NormalizationStats& stats,
               const Hyperparameters& h, const CvConfig& cv, CvAudit* audit) {
  const auto rho = static_cast<size_t>(h.rho);
  const size_t p = split_point(m.cols(), cv.split_ratio);
  if (p < rho + 1)
    throw Error("initial training region has " + std::to_string(p) +
                " columns but rho+1 = " + std::to_string(rho + 1) + " are needed");

  NetworkParameters params;
  bool have_params = false;

  auto slice_columns = [&](size_t count) {
    FeatureMatrix sub;
    sub.names = m.names;
    sub.t0 = m.t0;
    sub.interval = m.interval;
    sub.values = Mat(m.rows(), count);
    for (size_t r = 0; r < m.rows(); ++r)
      for (size_t c = 0; c < count; ++c) sub.values(r, c) = m.values(r, c);
    return sub;
  };

  TrainHook fit = [&](size_t train_end) {
    const FeatureMatrix region = slice_columns(train_end);
    if (cv.retrain_mode == RetrainMode::from_scratch || !have_params) {
      params = train(region, h).params;
    } else {
      params = train_from(params, region, h).params;
    }
    have_params = true;
  };

  PredictHook predict = [&](size_t column) {
    if (column < rho)
      throw Error("cannot predict column " + std::to_string(column) +
                  ": fewer than rho columns precede it");
    if (audit) audit->push_back({column, column - rho, column - 1, false});
    return predict_next(params, h, m, column - rho);
  };

  return run_walk_forward(m, stats, cv, fit, predict, audit);
}

SweepReport sweep(const FeatureMatrix& m, const NormalizationStats& stats,
                  const Hyperparameters& base, const CvConfig& cv, const std::string& param,
                  const std::vector<double>& grid) {
  if (grid.empty()) throw Error("sweep grid is empty");

  auto apply = [&](Hyperparameters h, double value, size_t index) {
    if (param == "init_range") {
      h.init_range = value;
    } else if (param == "learning_rate") {
      h.learning_rate = value;
    } else if (param == "rho") {
      h.rho = static_cast<int>(value);
      if (h.rho < 1 || static_cast<double>(h.rho) != value)
        throw Error("rho grid values must be positive integers");
    } else if (param == "hidden_dim") {
      h.hidden_dim = static_cast<int>(value);
      if (h.hidden_dim < 1 || static_cast<double>(h.hidden_dim) != value)
        throw Error("hidden_dim grid values must be positive integers");
    } else {
      throw Error("unknown sweep parameter: " + param);
    }
    h.seed = mix_seed(base.seed, index);
    return h;
  };

  // Grid points are independent runs, so evaluate them concurrently and
  // assemble in grid order to keep the report deterministic.
  std::vector<std::future<CvReport>> jobs;
  jobs.reserve(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const Hyperparameters h = apply(base, grid[i], i);
    jobs.push_back(std::async(std::launch::async,
                              [&m, &stats, &cv, h] { return tskcv(m, stats, h, cv); }));
  }

  SweepReport report;
  report.param = param;
  for (size_t i = 0; i < grid.size(); ++i) {
    SweepPoint point;
    point.value = grid[i];
    point.channel_rmse = jobs[i].get().channel_rmse;
    report.points.push_back(point);
  }
  return report;
}

}  // namespace ccast
