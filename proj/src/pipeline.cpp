#include "ccast/pipeline.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "ccast/error.hpp"

namespace ccast {

double NormalizationStats::normalize(size_t row, double x) const {
  const double lo = row_min[row], hi = row_max[row];
  if (hi == lo) return 0.0;
  return 2.0 * (x - lo) / (hi - lo) - 1.0;
}

double NormalizationStats::denormalize(size_t row, double y) const {
  const double lo = row_min[row], hi = row_max[row];
  if (hi == lo) return lo;
  return (y + 1.0) / 2.0 * (hi - lo) + lo;
}

FeatureMatrix build_features(const CandleSeries& series, const IndicatorConfig& cfg) {
  const size_t n = series.size();
  if (n == 0) throw Error("cannot build features from an empty series");

  std::vector<double> close(n);
  for (size_t i = 0; i < n; ++i) close[i] = series.candles[i].close;

  // The slowest close-derived row decides how many leading columns we lose.
  // Indicator preconditions fire first if the series cannot even warm up.
  const auto sma_row = sma(close, cfg.sma_period);
  const auto ema_row = ema(close, cfg.ema_period);
  const auto dema_row = dema(close, cfg.dema_period);
  const auto rsi_row = rsi(close, cfg.rsi_period);
  const auto roc_row = roc(close, cfg.roc_period);
  const auto macd_rows = macd(close, cfg.macd_fast, cfg.macd_slow, cfg.macd_signal);

  size_t first = 0;
  auto first_defined = [](const std::vector<double>& v) {
    size_t i = 0;
    while (i < v.size() && std::isnan(v[i])) ++i;
    return i;
  };
  for (const auto* row : {&sma_row, &ema_row, &dema_row, &rsi_row, &roc_row,
                          &macd_rows.macd_line, &macd_rows.signal_line})
    first = std::max(first, first_defined(*row));
  if (first >= n) throw Error("series too short: no columns survive indicator warm-up");

  FeatureMatrix m;
  m.names = feature_names();
  m.t0 = series.candles[first].timestamp;
  m.interval = series.interval;
  m.values = Mat(kFeatureCount, n - first);
  for (size_t t = first; t < n; ++t) {
    const size_t col = t - first;
    const Candle& c = series.candles[t];
    m.values(0, col) = c.open;
    m.values(1, col) = c.high;
    m.values(2, col) = c.low;
    m.values(3, col) = c.close;
    m.values(4, col) = sma_row[t];
    m.values(5, col) = ema_row[t];
    m.values(6, col) = dema_row[t];
    m.values(7, col) = rsi_row[t];
    m.values(8, col) = roc_row[t];
    m.values(9, col) = macd_rows.macd_line[t];
    m.values(10, col) = macd_rows.signal_line[t];
  }
  return m;
}

FeatureMatrix difference(const FeatureMatrix& m) {
  if (m.cols() < 2) throw Error("difference needs at least two columns");
  FeatureMatrix out;
  out.names = m.names;
  out.t0 = m.t0 + m.interval;
  out.interval = m.interval;
  out.values = Mat(m.rows(), m.cols() - 1);
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c + 1 < m.cols(); ++c)
      out.values(r, c) = m.values(r, c + 1) - m.values(r, c);
  return out;
}

FeatureMatrix undifference(const FeatureMatrix& diff, const std::vector<double>& first_column,
                           int64_t t0) {
  if (first_column.size() != diff.rows())
    throw Error("undifference: first column size does not match row count");
  FeatureMatrix out;
  out.names = diff.names;
  out.t0 = t0;
  out.interval = diff.interval;
  out.values = Mat(diff.rows(), diff.cols() + 1);
  for (size_t r = 0; r < diff.rows(); ++r) {
    out.values(r, 0) = first_column[r];
    for (size_t c = 0; c < diff.cols(); ++c)
      out.values(r, c + 1) = out.values(r, c) + diff.values(r, c);
  }
  return out;
}

NormalizationStats compute_row_stats(const FeatureMatrix& m, size_t first_cols) {
  if (first_cols == 0 || first_cols > m.cols())
    throw Error("normalization stats need between 1 and column-count columns");
  NormalizationStats stats;
  stats.names = m.names;
  stats.row_min.resize(m.rows());
  stats.row_max.resize(m.rows());
  for (size_t r = 0; r < m.rows(); ++r) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < first_cols; ++c) {
      lo = std::min(lo, m.values(r, c));
      hi = std::max(hi, m.values(r, c));
    }
    stats.row_min[r] = lo;
    stats.row_max[r] = hi;
  }
  return stats;
}

FeatureMatrix apply_normalization(const FeatureMatrix& m, const NormalizationStats& stats) {
  if (stats.size() != m.rows()) throw Error("normalization stats row count mismatch");
  FeatureMatrix out = m;
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < m.cols(); ++c)
      out.values(r, c) = stats.normalize(r, m.values(r, c));
  return out;
}

std::pair<FeatureMatrix, NormalizationStats> normalize_rows(const FeatureMatrix& m) {
  NormalizationStats stats = compute_row_stats(m, m.cols());
  return {apply_normalization(m, stats), std::move(stats)};
}

FeatureMatrix denormalize(const FeatureMatrix& m, const NormalizationStats& stats) {
  if (stats.size() != m.rows()) throw Error("normalization stats row count mismatch");
  FeatureMatrix out = m;
  for (size_t r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < m.cols(); ++c)
      out.values(r, c) = stats.denormalize(r, m.values(r, c));
  return out;
}

Candle reconstruct_prediction(const std::array<double, kOhlcChannels>& y_norm,
                              const NormalizationStats& stats, const Candle& last_candle,
                              int64_t interval) {
  if (stats.size() < kOhlcChannels)
    throw Error("reconstruction needs stats for the four price channels");
  Candle out;
  out.timestamp = last_candle.timestamp + interval;
  out.open = last_candle.open + stats.denormalize(0, y_norm[0]);
  out.high = last_candle.high + stats.denormalize(1, y_norm[1]);
  out.low = last_candle.low + stats.denormalize(2, y_norm[2]);
  out.close = last_candle.close + stats.denormalize(3, y_norm[3]);
  return out;
}

size_t split_point(size_t cols, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("split ratio must be in (0, 1)");
  const auto cut = static_cast<size_t>(std::llround(ratio * static_cast<double>(cols)));
  if (cut == 0 || cut >= cols) throw Error("split leaves an empty side");
  return cut;
}

std::pair<FeatureMatrix, FeatureMatrix> split(const FeatureMatrix& m, double ratio) {
  const size_t cut = split_point(m.cols(), ratio);
  FeatureMatrix head, tail;
  head.names = tail.names = m.names;
  head.interval = tail.interval = m.interval;
  head.t0 = m.t0;
  tail.t0 = m.t0 + static_cast<int64_t>(cut) * m.interval;
  head.values = Mat(m.rows(), cut);
  tail.values = Mat(m.rows(), m.cols() - cut);
  for (size_t r = 0; r < m.rows(); ++r) {
    for (size_t c = 0; c < cut; ++c) head.values(r, c) = m.values(r, c);
    for (size_t c = cut; c < m.cols(); ++c) tail.values(r, c - cut) = m.values(r, c);
  }
  return {std::move(head), std::move(tail)};
}

PipelineArtifacts run_pipeline(const CandleSeries& series, const IndicatorConfig& cfg,
                               double train_fraction) {
  PipelineArtifacts art;
  const FeatureMatrix features = build_features(series, cfg);
  const FeatureMatrix diff = difference(features);
  art.stats_columns = split_point(diff.cols(), train_fraction);
  art.stats = compute_row_stats(diff, art.stats_columns);
  art.normalized = apply_normalization(diff, art.stats);
  art.last_raw_candle = series.candles.back();
  art.interval = series.interval;
  art.stages = pipeline_stages();
  return art;
}

namespace {

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
    throw Error("matrix file truncated while reading " + what);
  return v;
}

void write_string(std::ofstream& out, const std::string& s) {
  write_pod<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in, const std::string& what) {
  const auto len = read_pod<uint32_t>(in, what);
  std::string s(len, '\0');
  if (len && !in.read(s.data(), len)) throw Error("matrix file truncated while reading " + what);
  return s;
}

constexpr char kMatrixMagic[4] = {'C', 'C', 'M', 'X'};
constexpr uint32_t kMatrixVersion = 1;

}  // namespace

void save_matrix(const FeatureMatrix& m, const std::string& path, const Provenance& prov) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write matrix file: " + path);
  out.write(kMatrixMagic, 4);
  write_pod<uint32_t>(out, kMatrixVersion);
  write_pod<uint64_t>(out, m.rows());
  write_pod<uint64_t>(out, m.cols());
  write_pod<int64_t>(out, m.t0);
  write_pod<int64_t>(out, m.interval);
  write_pod<uint64_t>(out, prov.seed);
  write_string(out, prov.config_hash);
  write_pod<uint32_t>(out, static_cast<uint32_t>(m.names.size()));
  for (const auto& name : m.names) write_string(out, name);
  out.write(reinterpret_cast<const char*>(m.values.raw().data()),
            static_cast<std::streamsize>(m.values.raw().size() * sizeof(double)));
  if (!out) throw Error("failed writing matrix file: " + path);
}

FeatureMatrix load_matrix(const std::string& path, Provenance* prov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open matrix file: " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMatrixMagic, 4) != 0)
    throw Error("not a matrix file: " + path);
  const auto version = read_pod<uint32_t>(in, "version");
  if (version != kMatrixVersion)
    throw Error("unsupported matrix file version " + std::to_string(version));
  FeatureMatrix m;
  const auto rows = read_pod<uint64_t>(in, "rows");
  const auto cols = read_pod<uint64_t>(in, "cols");
  m.t0 = read_pod<int64_t>(in, "t0");
  m.interval = read_pod<int64_t>(in, "interval");
  Provenance p;
  p.seed = read_pod<uint64_t>(in, "seed");
  p.config_hash = read_string(in, "config hash");
  if (prov) *prov = p;
  const auto name_count = read_pod<uint32_t>(in, "name count");
  m.names.reserve(name_count);
  for (uint32_t i = 0; i < name_count; ++i) m.names.push_back(read_string(in, "name"));
  m.values = Mat(rows, cols);
  if (rows * cols > 0 &&
      !in.read(reinterpret_cast<char*>(m.values.raw().data()),
               static_cast<std::streamsize>(rows * cols * sizeof(double))))
    throw Error("matrix file truncated while reading values");
  return m;
}

}  // namespace ccast
