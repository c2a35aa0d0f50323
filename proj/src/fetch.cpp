#include "ccast/fetch.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ccast/error.hpp"

namespace ccast {

namespace {

using nlohmann::json;

std::string build_query(const EndpointConfig& ep, const std::string& pair, int limit,
                        int64_t to_ts) {
  std::string q = ep.path;
  q += '?';
  q += ep.pair_param + '=' + httplib::detail::encode_query_param(pair);
  q += '&' + ep.limit_param + '=' + std::to_string(limit);
  q += '&' + ep.to_ts_param + '=' + std::to_string(to_ts);
  return q;
}

std::string fetch_page(const EndpointConfig& ep, const std::string& target,
                       const FetchOptions& opts) {
  std::string last_error;
  for (int attempt = 0; attempt < opts.attempts; ++attempt) {
    if (attempt > 0) {
      const auto delay = opts.backoff_base_ms * (1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    httplib::Client client(ep.base_url);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(30, 0);
    auto res = client.Get(target);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    return res->body;
  }
  throw Error("fetch failed after " + std::to_string(opts.attempts) + " attempts (" +
              last_error + ")");
}

std::vector<Candle> parse_page(const EndpointConfig& ep, const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(std::string("history response is not valid JSON: ") + e.what());
  }
  if (!j.contains(ep.data_key) || !j[ep.data_key].is_array())
    throw Error("history response missing array field '" + ep.data_key + "'");

  std::vector<Candle> out;
  for (const auto& row : j[ep.data_key]) {
    for (const std::string* key :
         {&ep.time_key, &ep.open_key, &ep.high_key, &ep.low_key, &ep.close_key})
      if (!row.contains(*key))
        throw Error("history row missing field '" + *key + "'");
    Candle c;
    c.timestamp = row[ep.time_key].get<int64_t>();
    c.open = row[ep.open_key].get<double>();
    c.high = row[ep.high_key].get<double>();
    c.low = row[ep.low_key].get<double>();
    c.close = row[ep.close_key].get<double>();
    if (!ep.volume_key.empty() && row.contains(ep.volume_key))
      c.volume = row[ep.volume_key].get<double>();
    check_candle(c);
    out.push_back(c);
  }
  return out;
}

}  // namespace

CandleSeries fetch_history(const EndpointConfig& endpoint, const std::string& pair,
                           int64_t interval, int64_t from_ts, int64_t to_ts,
                           const FetchOptions& opts) {
  if (interval <= 0) throw Error("fetch interval must be positive");
  if (from_ts > to_ts) throw Error("fetch range is empty: from > to");
  if (endpoint.base_url.empty()) throw Error("fetch endpoint base_url is empty");
  if (endpoint.max_page < 1) throw Error("fetch max_page must be >= 1");

  // Newest page first, walking the end-timestamp cursor backwards.
  std::map<int64_t, Candle> merged;
  int64_t cursor = to_ts;
  while (true) {
    const int64_t remaining = (cursor - from_ts) / interval + 1;
    if (remaining <= 0) break;
    const int limit =
        static_cast<int>(std::min<int64_t>(endpoint.max_page, remaining));
    const std::string body =
        fetch_page(endpoint, build_query(endpoint, pair, limit, cursor), opts);
    const std::vector<Candle> page = parse_page(endpoint, body);
    if (page.empty())
      throw Error("history page at " + std::to_string(cursor) + " came back empty");

    int64_t earliest = page.front().timestamp;
    for (const Candle& c : page) {
      earliest = std::min(earliest, c.timestamp);
      if (c.timestamp >= from_ts && c.timestamp <= to_ts) merged.emplace(c.timestamp, c);
    }
    if (earliest <= from_ts) break;
    if (earliest > cursor)
      throw Error("history page moved forward instead of backwards");
    cursor = earliest - interval;
  }

  CandleSeries series;
  series.interval = interval;
  series.candles.reserve(merged.size());
  for (auto& [ts, c] : merged) series.candles.push_back(c);
  return series;
}

}  // namespace ccast
