#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccast/error.hpp"
#include "ccast/pipeline.hpp"
#include "ccast/validation.hpp"
#include "oracles.hpp"

using namespace ccast;

namespace {

struct SinePipeline {
  FeatureMatrix matrix;
  NormalizationStats stats;
};

const SinePipeline& sine() {
  static const SinePipeline sp = [] {
    const CandleSeries s = oracle::load_fixture("sine_500.csv");
    const PipelineArtifacts art = run_pipeline(s, {}, 0.8);
    return SinePipeline{art.normalized, art.stats};
  }();
  return sp;
}

FeatureMatrix head_columns(const FeatureMatrix& m, size_t count) {
  FeatureMatrix sub;
  sub.names = m.names;
  sub.t0 = m.t0;
  sub.interval = m.interval;
  sub.values = Mat(m.rows(), count);
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < count; ++c) sub.values(r, c) = m.values(r, c);
  return sub;
}

Hyperparameters tiny_cv_hyper() {
  Hyperparameters h;
  h.input_dim = 11;
  h.hidden_dim = 4;
  h.rho = 8;
  h.max_epochs = 2;
  h.early_stop_delta = 0.0;
  h.seed = 5;
  return h;
}

}  // namespace

TEST_CASE("rmse matches its definition") {
  CHECK(rmse({3.0, 4.0}) == doctest::Approx(std::sqrt(12.5)));
  CHECK(rmse({0.0, 0.0, 0.0}) == 0.0);
  CHECK_THROWS_AS(rmse({}), Error);
}

TEST_CASE("walk-forward cycle counts follow ceil(q / k)") {
  const auto& sp = sine();
  const size_t p = split_point(sp.matrix.cols(), 0.8);
  const size_t q = sp.matrix.cols() - p;

  for (int k : {1, 2, 5, static_cast<int>(q)}) {
    CAPTURE(k);
    CvConfig cv;
    cv.k = k;
    size_t fits = 0;
    const CvReport report = run_walk_forward(
        sp.matrix, sp.stats, cv, [&](size_t) { ++fits; },
        [&](size_t col) {
          std::array<double, kOhlcChannels> out{};
          for (size_t ch = 0; ch < kOhlcChannels; ++ch)
            out[ch] = sp.matrix.values(ch, col);
          return out;
        });

    const size_t expected_cycles = (q + k - 1) / static_cast<size_t>(k);
    CHECK(report.train_columns == p);
    CHECK(report.validation_columns == q);
    CHECK(report.cycles.size() == expected_cycles);
    CHECK(fits == expected_cycles);
    CHECK(report.abs_errors.size() == q);
    CHECK(report.cycles.front().first_column == p);

    size_t total = 0;
    for (const CvCycle& c : report.cycles) total += c.predictions;
    CHECK(total == q);
    // every cycle except possibly the last reveals exactly k columns
    for (size_t i = 0; i + 1 < report.cycles.size(); ++i)
      CHECK(report.cycles[i].predictions == static_cast<size_t>(k));
  }
}

TEST_CASE("a clairvoyant predictor scores zero error") {
  const auto& sp = sine();
  CvConfig cv;
  cv.k = 5;
  const CvReport report = run_walk_forward(
      sp.matrix, sp.stats, cv, [](size_t) {},
      [&](size_t col) {
        std::array<double, kOhlcChannels> out{};
        for (size_t ch = 0; ch < kOhlcChannels; ++ch)
          out[ch] = sp.matrix.values(ch, col);
        return out;
      });
  for (size_t ch = 0; ch < kOhlcChannels; ++ch) CHECK(report.channel_rmse[ch] == 0.0);
  for (const CvCycle& c : report.cycles)
    for (double r : c.rmse) CHECK(r == 0.0);
}

TEST_CASE("errors are reported in price space") {
  const auto& sp = sine();
  CvConfig cv;
  cv.k = 1;
  const size_t p = split_point(sp.matrix.cols(), 0.8);
  // "no change" predictor: its price-space error is the actual price change
  const CvReport report = run_walk_forward(
      sp.matrix, sp.stats, cv, [](size_t) {},
      [&](size_t) {
        std::array<double, kOhlcChannels> out{};
        for (size_t ch = 0; ch < kOhlcChannels; ++ch)
          out[ch] = sp.stats.normalize(ch, 0.0);
        return out;
      });
  for (size_t i = 0; i < report.abs_errors.size(); ++i)
    for (size_t ch = 0; ch < kOhlcChannels; ++ch)
      CHECK(report.abs_errors[i][ch] ==
            doctest::Approx(std::fabs(sp.stats.denormalize(ch, sp.matrix.values(ch, p + i))))
                .epsilon(1e-12));
}

TEST_CASE("walk-forward rejects impossible settings") {
  const auto& sp = sine();
  const size_t q = sp.matrix.cols() - split_point(sp.matrix.cols(), 0.8);
  auto fit = [](size_t) {};
  auto predict = [](size_t) { return std::array<double, kOhlcChannels>{}; };
  CvConfig cv;
  cv.k = 0;
  CHECK_THROWS_AS(run_walk_forward(sp.matrix, sp.stats, cv, fit, predict), Error);
  cv.k = static_cast<int>(q) + 1;
  CHECK_THROWS_AS(run_walk_forward(sp.matrix, sp.stats, cv, fit, predict), Error);
  cv.k = 1;
  NormalizationStats thin;
  thin.names = {"x"};
  thin.row_min = {0.0};
  thin.row_max = {1.0};
  CHECK_THROWS_AS(run_walk_forward(sp.matrix, thin, cv, fit, predict), Error);
}

TEST_CASE("the network walk-forward never reads at or past the predicted column") {
  const auto& sp = sine();
  const FeatureMatrix m = head_columns(sp.matrix, 120);
  const Hyperparameters h = tiny_cv_hyper();
  CvConfig cv;
  cv.k = 8;

  CvAudit audit;
  const CvReport report = tskcv(m, sp.stats, h, cv, &audit);

  const size_t p = split_point(m.cols(), 0.8);
  const size_t q = m.cols() - p;
  CHECK(report.cycles.size() == (q + 7) / 8);
  CHECK(!audit.empty());

  size_t training_records = 0, predict_records = 0;
  for (const ColumnAccess& a : audit) {
    CAPTURE(a.predicted_column);
    CHECK(a.last_read < a.predicted_column);
    CHECK(a.first_read <= a.last_read);
    if (a.training) {
      ++training_records;
      CHECK(a.first_read == 0);
    } else {
      ++predict_records;
      CHECK(a.first_read == a.predicted_column - static_cast<size_t>(h.rho));
    }
  }
  CHECK(training_records == report.cycles.size());
  CHECK(predict_records == q);

  for (size_t ch = 0; ch < kOhlcChannels; ++ch) {
    CHECK(std::isfinite(report.channel_rmse[ch]));
    CHECK(report.channel_rmse[ch] > 0.0);
  }
}

TEST_CASE("retraining modes genuinely differ") {
  const auto& sp = sine();
  const FeatureMatrix m = head_columns(sp.matrix, 120);
  const Hyperparameters h = tiny_cv_hyper();
  CvConfig cv;
  cv.k = 12;
  cv.retrain_mode = RetrainMode::from_scratch;
  const CvReport scratch = tskcv(m, sp.stats, h, cv);
  cv.retrain_mode = RetrainMode::warm_start;
  const CvReport warm = tskcv(m, sp.stats, h, cv);
  CHECK(scratch.channel_rmse != warm.channel_rmse);

  // both runs are individually reproducible
  cv.retrain_mode = RetrainMode::from_scratch;
  const CvReport again = tskcv(m, sp.stats, h, cv);
  CHECK(scratch.channel_rmse == again.channel_rmse);
  CHECK(scratch.abs_errors == again.abs_errors);
}

TEST_CASE("tskcv needs rho + 1 training columns") {
  const auto& sp = sine();
  const FeatureMatrix m = head_columns(sp.matrix, 20);  // p = 16
  Hyperparameters h = tiny_cv_hyper();
  h.rho = 16;
  CHECK_THROWS_AS(tskcv(m, sp.stats, h, {}), Error);
}

TEST_CASE("retrain mode names round-trip") {
  CHECK(to_string(RetrainMode::from_scratch) == "from_scratch");
  CHECK(to_string(RetrainMode::warm_start) == "warm_start");
  CHECK(retrain_mode_from_string("warm_start") == RetrainMode::warm_start);
  CHECK_THROWS_AS(retrain_mode_from_string("sometimes"), Error);
}

TEST_CASE("sweep evaluates every grid point under its own seed") {
  const auto& sp = sine();
  const FeatureMatrix m = head_columns(sp.matrix, 120);
  Hyperparameters h = tiny_cv_hyper();
  h.max_epochs = 1;
  CvConfig cv;
  cv.k = 12;

  const SweepReport report = sweep(m, sp.stats, h, cv, "hidden_dim", {2.0, 4.0});
  CHECK(report.param == "hidden_dim");
  REQUIRE(report.points.size() == 2);
  CHECK(report.points[0].value == 2.0);
  CHECK(report.points[1].value == 4.0);
  CHECK(report.points[0].channel_rmse != report.points[1].channel_rmse);
  for (const SweepPoint& p : report.points)
    for (double r : p.channel_rmse) CHECK(std::isfinite(r));

  // deterministic end to end, including the parallel scheduling
  const SweepReport again = sweep(m, sp.stats, h, cv, "hidden_dim", {2.0, 4.0});
  CHECK(again.points[0].channel_rmse == report.points[0].channel_rmse);
  CHECK(again.points[1].channel_rmse == report.points[1].channel_rmse);
}

TEST_CASE("sweep validates parameters and grids") {
  const auto& sp = sine();
  const FeatureMatrix m = head_columns(sp.matrix, 120);
  const Hyperparameters h = tiny_cv_hyper();
  CHECK_THROWS_AS(sweep(m, sp.stats, h, {}, "momentum", {0.1}), Error);
  CHECK_THROWS_AS(sweep(m, sp.stats, h, {}, "rho", {2.5}), Error);
  CHECK_THROWS_AS(sweep(m, sp.stats, h, {}, "hidden_dim", {-3.0}), Error);
  CHECK_THROWS_AS(sweep(m, sp.stats, h, {}, "learning_rate", {}), Error);
}
