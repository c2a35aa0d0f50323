#include "ccast/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ccast/error.hpp"

namespace ccast {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

double parse_price(const std::string& field, long line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error("malformed number '" + field + "' at line " + std::to_string(line));
  return v;
}

int64_t parse_timestamp(const std::string& field, long line) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw Error("malformed timestamp '" + field + "' at line " + std::to_string(line));
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CandleSeries parse_candles_csv(const std::string& text, int64_t interval) {
  if (text.empty()) throw Error("empty candle CSV");

  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("empty candle CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool has_volume = false;
  if (line == "timestamp,open,high,low,close") {
    has_volume = false;
  } else if (line == "timestamp,open,high,low,close,volume") {
    has_volume = true;
  } else {
    throw Error("unrecognized candle CSV header: " + line);
  }

  CandleSeries series;
  series.interval = interval;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    const size_t expected = has_volume ? 6 : 5;
    if (fields.size() != expected)
      throw Error("expected " + std::to_string(expected) + " fields at line " +
                  std::to_string(line_no));
    Candle c;
    c.timestamp = parse_timestamp(fields[0], line_no);
    c.open = parse_price(fields[1], line_no);
    c.high = parse_price(fields[2], line_no);
    c.low = parse_price(fields[3], line_no);
    c.close = parse_price(fields[4], line_no);
    if (has_volume && !fields[5].empty()) c.volume = parse_price(fields[5], line_no);
    check_candle(c, line_no);
    series.candles.push_back(c);
  }
  if (series.candles.empty()) throw Error("candle CSV has a header but no rows");
  return series;
}

CandleSeries load_candles_csv(const std::string& path, int64_t interval) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open candle CSV: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_candles_csv(buf.str(), interval);
}

std::string write_candles_csv(const CandleSeries& series) {
  bool has_volume = false;
  for (const Candle& c : series.candles)
    if (c.volume) has_volume = true;

  std::string out = has_volume ? "timestamp,open,high,low,close,volume\n"
                               : "timestamp,open,high,low,close\n";
  for (const Candle& c : series.candles) {
    out += std::to_string(c.timestamp);
    out += ',';
    out += format_double(c.open);
    out += ',';
    out += format_double(c.high);
    out += ',';
    out += format_double(c.low);
    out += ',';
    out += format_double(c.close);
    if (has_volume) {
      out += ',';
      if (c.volume) out += format_double(*c.volume);
    }
    out += '\n';
  }
  return out;
}

void save_candles_csv(const CandleSeries& series, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write candle CSV: " + path);
  out << write_candles_csv(series);
}

}  // namespace ccast
