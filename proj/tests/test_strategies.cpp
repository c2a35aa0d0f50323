#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccast/error.hpp"
#include "ccast/strategies.hpp"
#include "oracles.hpp"

using namespace ccast;

namespace {

// The crossover rule restated locally, applied to oracle indicator values.
Signal expected_crossover(const std::vector<double>& fast, const std::vector<double>& slow) {
  const size_t n = fast.size();
  if (n < 2) return Signal::Hold;
  const double prev = fast[n - 2] - slow[n - 2];
  const double last = fast[n - 1] - slow[n - 1];
  if (std::isnan(prev) || std::isnan(last)) return Signal::Hold;
  if (prev <= 0.0 && last > 0.0) return Signal::Buy;
  if (prev >= 0.0 && last < 0.0) return Signal::Sell;
  return Signal::Hold;
}

std::vector<double> wave(size_t n) {
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i)
    v[i] = 100.0 + 8.0 * std::sin(static_cast<double>(i) / 7.0);
  return v;
}

}  // namespace

TEST_CASE("roc thresholds, boundaries included") {
  const StrategyConfig cfg;
  CHECK(roc_signal(100.0, 100.51, cfg) == Signal::Buy);
  CHECK(roc_signal(100.0, 99.49, cfg) == Signal::Sell);
  CHECK(roc_signal(100.0, 100.2, cfg) == Signal::Hold);
  CHECK(roc_signal(100.0, 100.0, cfg) == Signal::Hold);
  // exactly at a threshold is still a hold
  CHECK(roc_signal(100.0, 100.5, cfg) == Signal::Hold);
  CHECK(roc_signal(100.0, 99.5, cfg) == Signal::Hold);
  CHECK_THROWS_AS(roc_signal(0.0, 1.0, cfg), Error);
}

TEST_CASE("roc reacts to relative change, so scale does not matter") {
  const StrategyConfig cfg;
  for (double scale : {1.0, 1000.0, 1e-3}) {
    CHECK(roc_signal(100.0 * scale, 101.0 * scale, cfg) == Signal::Buy);
    CHECK(roc_signal(100.0 * scale, 99.0 * scale, cfg) == Signal::Sell);
  }
}

TEST_CASE("rsi extremes map to contrarian signals") {
  const StrategyConfig cfg;
  std::vector<double> up, down, flat;
  for (int i = 0; i < 20; ++i) {
    up.push_back(100.0 + i);
    down.push_back(120.0 - i);
    flat.push_back(100.0);
  }
  CHECK(rsi_signal(up, cfg) == Signal::Sell);    // overbought
  CHECK(rsi_signal(down, cfg) == Signal::Buy);   // oversold
  CHECK(rsi_signal(flat, cfg) == Signal::Hold);  // neutral 50
  CHECK_THROWS_AS(rsi_signal(std::vector<double>(10, 100.0), cfg), Error);
}

TEST_CASE("rsi is scale-invariant") {
  const StrategyConfig cfg;
  std::vector<double> closes = wave(40);
  std::vector<double> scaled = closes;
  for (double& v : scaled) v *= 1000.0;
  CHECK(rsi_signal(closes, cfg) == rsi_signal(scaled, cfg));
}

TEST_CASE("dema crossovers fire only when the final step crosses") {
  const StrategyConfig cfg;
  const std::vector<double> base = wave(120);
  int buys = 0, sells = 0, holds = 0;
  for (size_t end = 60; end <= base.size(); ++end) {
    const std::vector<double> closes(base.begin(), base.begin() + end);
    const Signal got = dema_signal(closes, cfg);
    const Signal want = expected_crossover(oracle::dema(closes, cfg.dema_short),
                                           oracle::dema(closes, cfg.dema_long));
    CAPTURE(end);
    CHECK(got == want);
    if (got == Signal::Buy) ++buys;
    if (got == Signal::Sell) ++sells;
    if (got == Signal::Hold) ++holds;
  }
  // the wave produces every kind of decision somewhere
  CHECK(buys > 0);
  CHECK(sells > 0);
  CHECK(holds > buys + sells);
}

TEST_CASE("dema validates its configuration and history") {
  StrategyConfig cfg;
  cfg.dema_short = 21;
  cfg.dema_long = 10;
  CHECK_THROWS_AS(dema_signal(wave(120), cfg), Error);
  cfg.dema_short = 10;
  cfg.dema_long = 21;
  CHECK_THROWS_AS(dema_signal(wave(40), cfg), Error);  // needs 2*21-1
  // exactly the minimum length: defined value only at the last point, so hold
  CHECK(dema_signal(wave(41), cfg) == Signal::Hold);
}

TEST_CASE("macd crossovers match the oracle rule") {
  const StrategyConfig cfg;
  const std::vector<double> base = wave(160);
  int fired = 0;
  for (size_t end = 60; end <= base.size(); ++end) {
    const std::vector<double> closes(base.begin(), base.begin() + end);
    const Signal got = macd_signal(closes, cfg);
    const oracle::Macd m = oracle::macd(closes, cfg.macd_fast, cfg.macd_slow, cfg.macd_signal);
    CAPTURE(end);
    CHECK(got == expected_crossover(m.line, m.signal));
    if (got != Signal::Hold) ++fired;
  }
  CHECK(fired > 0);
}

TEST_CASE("macd is scale-invariant") {
  const StrategyConfig cfg;
  for (size_t end : {80u, 100u, 140u}) {
    std::vector<double> closes = wave(end);
    std::vector<double> scaled = closes;
    for (double& v : scaled) v *= 250.0;
    CHECK(macd_signal(closes, cfg) == macd_signal(scaled, cfg));
  }
}

TEST_CASE("random signals are deterministic per seed and roughly uniform") {
  Rng a(42), b(42), c(7);
  std::vector<Signal> seq_a, seq_b, seq_c;
  for (int i = 0; i < 200; ++i) {
    seq_a.push_back(random_signal(a));
    seq_b.push_back(random_signal(b));
    seq_c.push_back(random_signal(c));
  }
  CHECK(seq_a == seq_b);
  CHECK(seq_a != seq_c);

  int counts[3] = {0, 0, 0};
  Rng r(123);
  for (int i = 0; i < 3000; ++i) counts[static_cast<int>(random_signal(r))] += 1;
  for (int count : counts) CHECK(count > 800);
}

TEST_CASE("buy and hold buys once") {
  CHECK(buy_and_hold_signal(0) == Signal::Buy);
  for (size_t i = 1; i < 10; ++i) CHECK(buy_and_hold_signal(i) == Signal::Hold);
}

TEST_CASE("strategy names round-trip") {
  for (StrategyKind k : {StrategyKind::roc, StrategyKind::rsi, StrategyKind::dema,
                         StrategyKind::macd, StrategyKind::random, StrategyKind::buyhold})
    CHECK(strategy_from_name(to_string(k)) == k);
  CHECK_THROWS_AS(strategy_from_name("martingale"), Error);
  CHECK(to_string(Signal::Buy) == "buy");
  CHECK(to_string(Signal::Sell) == "sell");
  CHECK(to_string(Signal::Hold) == "hold");
}
