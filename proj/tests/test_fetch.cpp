#include <doctest.h>

#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ccast/error.hpp"
#include "ccast/fetch.hpp"

using namespace ccast;
using nlohmann::json;

namespace {

constexpr int64_t kHour = 3600;
constexpr int64_t kT0 = 1546300800;  // 2019-01-01T00:00:00Z

std::string msg_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// The canonical synthetic bar for a timestamp, so every page is reproducible
// and overlapping pages agree unless a test deliberately pollutes them.
json bar_at(int64_t ts, bool with_volume = false, double close_shift = 0.0) {
  const double base = 100.0 + double((ts / kHour) % 50);
  json row;
  row["time"] = ts;
  row["open"] = base;
  row["high"] = base + 1.0;
  row["low"] = base - 1.0;
  row["close"] = base + 0.5 + close_shift;
  if (with_volume) row["volumefrom"] = 10.0 + double((ts / kHour) % 7);
  return row;
}

double canonical_close(int64_t ts) { return 100.0 + double((ts / kHour) % 50) + 0.5; }

struct PageRequest {
  std::string pair;
  int limit = 0;
  int64_t to_ts = 0;
};

// In-process endpoint speaking the newest-first paginated history protocol.
// Handlers run on the server thread, so they only record; all assertions
// happen on the test thread.
class HistoryServer {
 public:
  using Handler = std::function<void(const PageRequest&, size_t index, httplib::Response&)>;

  explicit HistoryServer(Handler handler) : handler_(std::move(handler)) {
    server_.Get("/data/histohour",
                [this](const httplib::Request& req, httplib::Response& res) {
                  PageRequest page;
                  page.pair = req.get_param_value("pair");
                  if (req.has_param("limit")) page.limit = std::stoi(req.get_param_value("limit"));
                  if (req.has_param("toTs")) page.to_ts = std::stoll(req.get_param_value("toTs"));
                  size_t index = 0;
                  {
                    std::lock_guard<std::mutex> lock(mu_);
                    index = log_.size();
                    log_.push_back(page);
                  }
                  handler_(page, index, res);
                });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~HistoryServer() {
    server_.stop();
    thread_.join();
  }

  bool ok() const { return port_ > 0; }

  EndpointConfig endpoint() const {
    EndpointConfig ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port_);
    return ep;
  }

  std::vector<PageRequest> requests() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
  }

 private:
  httplib::Server server_;
  Handler handler_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::vector<PageRequest> log_;
};

// Serves exactly `limit` consecutive hourly bars ending at toTs.
HistoryServer::Handler well_behaved(bool with_volume = false) {
  return [with_volume](const PageRequest& page, size_t, httplib::Response& res) {
    json rows = json::array();
    for (int i = page.limit - 1; i >= 0; --i)
      rows.push_back(bar_at(page.to_ts - i * kHour, with_volume));
    res.set_content(json{{"Data", rows}}.dump(), "application/json");
  };
}

}  // namespace

TEST_CASE("a span within one page takes a single request") {
  HistoryServer server(well_behaved());
  REQUIRE(server.ok());

  const int64_t from = kT0;
  const int64_t to = kT0 + 99 * kHour;
  const CandleSeries s = fetch_history(server.endpoint(), "BTC/USDT", kHour, from, to);

  REQUIRE(s.size() == 100);
  CHECK(s.interval == kHour);
  CHECK(s.candles.front().timestamp == from);
  CHECK(s.candles.back().timestamp == to);
  for (size_t i = 0; i < s.size(); ++i) {
    CHECK(s.candles[i].timestamp == from + int64_t(i) * kHour);
    CHECK(s.candles[i].close == canonical_close(s.candles[i].timestamp));
    CHECK(!s.candles[i].volume.has_value());
  }

  const auto reqs = server.requests();
  REQUIRE(reqs.size() == 1);
  // The pair survives URL encoding of the slash, and the single page asks
  // for exactly the remaining span, not the server cap.
  CHECK(reqs[0].pair == "BTC/USDT");
  CHECK(reqs[0].limit == 100);
  CHECK(reqs[0].to_ts == to);
}

TEST_CASE("long spans page backwards under the per-request cap") {
  HistoryServer server(well_behaved());
  REQUIRE(server.ok());

  const int64_t from = kT0;
  const int64_t to = kT0 + 4499 * kHour;  // 4500 bars, cap 2000
  const CandleSeries s = fetch_history(server.endpoint(), "BTC/USDT", kHour, from, to);

  REQUIRE(s.size() == 4500);
  CHECK(s.candles.front().timestamp == from);
  CHECK(s.candles.back().timestamp == to);
  for (size_t i = 1; i < s.size(); ++i)
    CHECK(s.candles[i].timestamp - s.candles[i - 1].timestamp == kHour);

  const auto reqs = server.requests();
  REQUIRE(reqs.size() == 3);
  CHECK(reqs[0].limit == 2000);
  CHECK(reqs[0].to_ts == to);
  CHECK(reqs[1].limit == 2000);
  CHECK(reqs[1].to_ts == to - 2000 * kHour);
  CHECK(reqs[2].limit == 500);
  CHECK(reqs[2].to_ts == to - 4000 * kHour);
}

TEST_CASE("overlapping rows deduplicate and out-of-range rows are clipped") {
  // Each page carries three bonus bars newer than its cursor. On the first
  // page they fall beyond the requested range; on later pages they duplicate
  // bars already merged, with a polluted close so survivors are identifiable.
  HistoryServer server([](const PageRequest& page, size_t index, httplib::Response& res) {
    json rows = json::array();
    for (int i = page.limit - 1; i >= 0; --i) rows.push_back(bar_at(page.to_ts - i * kHour));
    for (int i = 1; i <= 3; ++i)
      rows.push_back(bar_at(page.to_ts + i * kHour, false, 0.125 * double(index + 1)));
    res.set_content(json{{"Data", rows}}.dump(), "application/json");
  });
  REQUIRE(server.ok());

  EndpointConfig ep = server.endpoint();
  ep.max_page = 100;
  const int64_t from = kT0;
  const int64_t to = kT0 + 299 * kHour;  // 300 bars in 3 pages of 100
  const CandleSeries s = fetch_history(ep, "BTC/USDT", kHour, from, to);

  REQUIRE(s.size() == 300);
  CHECK(s.candles.front().timestamp == from);
  CHECK(s.candles.back().timestamp == to);
  for (const Candle& c : s.candles) {
    CHECK(c.timestamp >= from);
    CHECK(c.timestamp <= to);
    // Newer pages are merged first, so the polluted duplicates lost.
    CHECK(c.close == canonical_close(c.timestamp));
  }
  CHECK(server.requests().size() == 3);
}

TEST_CASE("transient server errors are retried until a page succeeds") {
  HistoryServer server([](const PageRequest& page, size_t index, httplib::Response& res) {
    if (index == 0) {
      res.status = 500;
      return;
    }
    json rows = json::array();
    for (int i = page.limit - 1; i >= 0; --i) rows.push_back(bar_at(page.to_ts - i * kHour));
    res.set_content(json{{"Data", rows}}.dump(), "application/json");
  });
  REQUIRE(server.ok());

  FetchOptions opts;
  opts.attempts = 3;
  opts.backoff_base_ms = 1;
  const CandleSeries s =
      fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour, opts);
  CHECK(s.size() == 10);
  CHECK(server.requests().size() == 2);
}

TEST_CASE("persistent server errors exhaust the attempt budget") {
  HistoryServer server([](const PageRequest&, size_t, httplib::Response& res) {
    res.status = 503;
  });
  REQUIRE(server.ok());

  FetchOptions opts;
  opts.attempts = 2;
  opts.backoff_base_ms = 1;
  const std::string msg = msg_of([&] {
    fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour, opts);
  });
  CHECK(msg.find("fetch failed after 2 attempts") != std::string::npos);
  CHECK(msg.find("HTTP status 503") != std::string::npos);
  CHECK(server.requests().size() == 2);
}

TEST_CASE("schema surprises fail fast instead of retrying") {
  size_t expected_requests = 0;

  SUBCASE("body is not JSON") {
    HistoryServer server([](const PageRequest&, size_t, httplib::Response& res) {
      res.set_content("{oops", "application/json");
    });
    REQUIRE(server.ok());
    CHECK(msg_of([&] {
            fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
          }).find("not valid JSON") != std::string::npos);
    expected_requests = server.requests().size();
  }

  SUBCASE("data array is missing") {
    HistoryServer server([](const PageRequest&, size_t, httplib::Response& res) {
      res.set_content(json{{"Result", json::array()}}.dump(), "application/json");
    });
    REQUIRE(server.ok());
    CHECK(msg_of([&] {
            fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
          }).find("missing array field 'Data'") != std::string::npos);
    expected_requests = server.requests().size();
  }

  SUBCASE("a row lacks a price field") {
    HistoryServer server([](const PageRequest& page, size_t, httplib::Response& res) {
      json row = bar_at(page.to_ts);
      row.erase("close");
      res.set_content(json{{"Data", json::array({row})}}.dump(), "application/json");
    });
    REQUIRE(server.ok());
    CHECK(msg_of([&] {
            fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
          }).find("missing field 'close'") != std::string::npos);
    expected_requests = server.requests().size();
  }

  SUBCASE("a row violates the bar invariants") {
    HistoryServer server([](const PageRequest& page, size_t, httplib::Response& res) {
      json row = bar_at(page.to_ts);
      row["high"] = row["low"].get<double>() - 5.0;
      res.set_content(json{{"Data", json::array({row})}}.dump(), "application/json");
    });
    REQUIRE(server.ok());
    CHECK_THROWS_AS(
        fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour), Error);
    expected_requests = server.requests().size();
  }

  CHECK(expected_requests == 1);
}

TEST_CASE("an empty page is an error") {
  HistoryServer server([](const PageRequest&, size_t, httplib::Response& res) {
    res.set_content(json{{"Data", json::array()}}.dump(), "application/json");
  });
  REQUIRE(server.ok());
  CHECK(msg_of([&] {
          fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
        }).find("came back empty") != std::string::npos);
}

TEST_CASE("pages that move the cursor forward are rejected") {
  HistoryServer server([](const PageRequest& page, size_t, httplib::Response& res) {
    json rows = json::array({bar_at(page.to_ts + 2 * kHour)});
    res.set_content(json{{"Data", rows}}.dump(), "application/json");
  });
  REQUIRE(server.ok());
  CHECK(msg_of([&] {
          fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
        }).find("moved forward") != std::string::npos);
}

TEST_CASE("volume flows through only when the endpoint declares a key") {
  HistoryServer server(well_behaved(/*with_volume=*/true));
  REQUIRE(server.ok());

  EndpointConfig with_key = server.endpoint();
  with_key.volume_key = "volumefrom";
  const CandleSeries v = fetch_history(with_key, "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
  REQUIRE(v.size() == 10);
  for (const Candle& c : v.candles) {
    REQUIRE(c.volume.has_value());
    CHECK(*c.volume == 10.0 + double((c.timestamp / kHour) % 7));
  }

  const CandleSeries no_key =
      fetch_history(server.endpoint(), "BTC/USDT", kHour, kT0, kT0 + 9 * kHour);
  REQUIRE(no_key.size() == 10);
  for (const Candle& c : no_key.candles) CHECK(!c.volume.has_value());
}

TEST_CASE("argument validation happens before any request") {
  EndpointConfig ep;
  ep.base_url = "http://127.0.0.1:1";
  CHECK(msg_of([&] { fetch_history(ep, "X", 0, kT0, kT0 + kHour); })
            .find("interval must be positive") != std::string::npos);
  CHECK(msg_of([&] { fetch_history(ep, "X", kHour, kT0 + kHour, kT0); })
            .find("range is empty") != std::string::npos);
  EndpointConfig blank;
  CHECK(msg_of([&] { fetch_history(blank, "X", kHour, kT0, kT0 + kHour); })
            .find("base_url is empty") != std::string::npos);
  EndpointConfig capless = ep;
  capless.max_page = 0;
  CHECK(msg_of([&] { fetch_history(capless, "X", kHour, kT0, kT0 + kHour); })
            .find("max_page") != std::string::npos);
}
