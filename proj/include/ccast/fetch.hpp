#pragma once

#include <cstdint>
#include <string>

#include "ccast/candle.hpp"

namespace ccast {

// Where and how to pull hourly history. The defaults match the common
// "histohour" style API: newest-first pagination driven by an end-timestamp
// query parameter, JSON body with an array of bar objects.
struct EndpointConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8080"
  std::string path = "/data/histohour";
  std::string pair_param = "pair";
  std::string limit_param = "limit";
  std::string to_ts_param = "toTs";
  std::string data_key = "Data";
  std::string time_key = "time";
  std::string open_key = "open";
  std::string high_key = "high";
  std::string low_key = "low";
  std::string close_key = "close";
  std::string volume_key;  // empty means the endpoint has no volume field
  int max_page = 2000;     // server-side page cap
};

struct FetchOptions {
  int attempts = 3;          // tries per page before giving up
  int backoff_base_ms = 500; // doubles on every retry
};

// Pages backwards from `to_ts` until `from_ts` is covered, then returns the
// deduplicated, ascending series clipped to [from_ts, to_ts]. Transport
// errors are retried with exponential backoff; schema surprises fail fast.
CandleSeries fetch_history(const EndpointConfig& endpoint, const std::string& pair,
                           int64_t interval, int64_t from_ts, int64_t to_ts,
                           const FetchOptions& opts = {});

}  // namespace ccast
