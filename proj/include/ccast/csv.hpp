#pragma once

#include <string>

#include "ccast/candle.hpp"

namespace ccast {

// Expected header: timestamp,open,high,low,close with an optional trailing
// volume column. Rows must satisfy the candle price invariants; violations
// raise an error naming the 1-based line. Ordering is not enforced here, run
// validate_series for that.
CandleSeries parse_candles_csv(const std::string& text, int64_t interval = 3600);

CandleSeries load_candles_csv(const std::string& path, int64_t interval = 3600);

// Prices are rendered with 17 significant digits so a parse of the output
// reproduces the series bit for bit. Lines end in LF.
std::string write_candles_csv(const CandleSeries& series);

void save_candles_csv(const CandleSeries& series, const std::string& path);

// Shared by every CSV artifact writer.
std::string format_double(double v);

}  // namespace ccast
