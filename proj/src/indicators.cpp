#include "ccast/indicators.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ccast/error.hpp"

namespace ccast {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_period(int n, const char* name) {
  if (n < 1) throw Error(std::string(name) + " period must be >= 1");
}

void require_length(size_t len, size_t needed, const char* name) {
  if (len < needed)
    throw Error(std::string(name) + " needs at least " + std::to_string(needed) +
                " values, got " + std::to_string(len));
}

// EMA recurrence over values[first..], seeding with the mean of the first n.
// Writes into out, which must be NaN-filled and input-sized.
void ema_into(const std::vector<double>& values, size_t first, int n,
              std::vector<double>& out) {
  const double alpha = 2.0 / (n + 1.0);
  double seed = 0.0;
  for (size_t i = first; i < first + static_cast<size_t>(n); ++i) seed += values[i];
  seed /= n;
  size_t at = first + n - 1;
  out[at] = seed;
  double prev = seed;
  for (size_t i = at + 1; i < values.size(); ++i) {
    prev = alpha * values[i] + (1.0 - alpha) * prev;
    out[i] = prev;
  }
}

}  // namespace

std::vector<double> sma(const std::vector<double>& values, int n) {
  require_period(n, "sma");
  require_length(values.size(), n, "sma");
  std::vector<double> out(values.size(), kNan);
  double window = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    window += values[i];
    if (i >= static_cast<size_t>(n)) window -= values[i - n];
    if (i + 1 >= static_cast<size_t>(n)) out[i] = window / n;
  }
  return out;
}

std::vector<double> ema(const std::vector<double>& values, int n) {
  require_period(n, "ema");
  require_length(values.size(), n, "ema");
  std::vector<double> out(values.size(), kNan);
  ema_into(values, 0, n, out);
  return out;
}

std::vector<double> dema(const std::vector<double>& values, int n) {
  require_period(n, "dema");
  require_length(values.size(), 2 * static_cast<size_t>(n) - 1, "dema");
  std::vector<double> e1 = ema(values, n);
  std::vector<double> e2(values.size(), kNan);
  ema_into(e1, n - 1, n, e2);  // the inner EMA is defined from n-1
  std::vector<double> out(values.size(), kNan);
  for (size_t i = 2 * n - 2; i < values.size(); ++i) out[i] = 2.0 * e1[i] - e2[i];
  return out;
}

std::vector<double> rsi(const std::vector<double>& values, int n) {
  require_period(n, "rsi");
  require_length(values.size(), static_cast<size_t>(n) + 1, "rsi");
  std::vector<double> out(values.size(), kNan);

  double avg_gain = 0.0, avg_loss = 0.0;
  for (size_t i = 1; i <= static_cast<size_t>(n); ++i) {
    const double change = values[i] - values[i - 1];
    if (change > 0.0)
      avg_gain += change;
    else
      avg_loss -= change;
  }
  avg_gain /= n;
  avg_loss /= n;

  auto value_at = [&](double gain, double loss) {
    if (loss == 0.0 && gain == 0.0) return 50.0;  // flat window, neutral
    if (loss == 0.0) return 100.0;
    return 100.0 - 100.0 / (1.0 + gain / loss);
  };

  out[n] = value_at(avg_gain, avg_loss);
  for (size_t i = n + 1; i < values.size(); ++i) {
    const double change = values[i] - values[i - 1];
    const double gain = change > 0.0 ? change : 0.0;
    const double loss = change < 0.0 ? -change : 0.0;
    avg_gain = (avg_gain * (n - 1) + gain) / n;
    avg_loss = (avg_loss * (n - 1) + loss) / n;
    out[i] = value_at(avg_gain, avg_loss);
  }
  return out;
}

std::vector<double> roc(const std::vector<double>& values, int n) {
  require_period(n, "roc");
  require_length(values.size(), static_cast<size_t>(n) + 1, "roc");
  std::vector<double> out(values.size(), kNan);
  for (size_t i = n; i < values.size(); ++i) {
    const double base = values[i - n];
    if (base == 0.0) throw Error("roc base value is zero at index " + std::to_string(i - n));
    out[i] = 100.0 * (values[i] - base) / base;
  }
  return out;
}

MacdResult macd(const std::vector<double>& values, int fast, int slow, int signal) {
  require_period(fast, "macd fast");
  require_period(slow, "macd slow");
  require_period(signal, "macd signal");
  if (fast >= slow) throw Error("macd fast period must be shorter than slow");
  require_length(values.size(), static_cast<size_t>(slow) + signal, "macd");

  MacdResult r;
  const std::vector<double> ema_fast = ema(values, fast);
  const std::vector<double> ema_slow = ema(values, slow);
  r.macd_line.assign(values.size(), kNan);
  for (size_t i = slow - 1; i < values.size(); ++i)
    r.macd_line[i] = ema_fast[i] - ema_slow[i];

  r.signal_line.assign(values.size(), kNan);
  ema_into(r.macd_line, slow - 1, signal, r.signal_line);

  r.histogram.assign(values.size(), kNan);
  for (size_t i = slow + signal - 2; i < values.size(); ++i)
    r.histogram[i] = r.macd_line[i] - r.signal_line[i];
  return r;
}

}  // namespace ccast
