#include "ccast/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ccast/error.hpp"

namespace ccast {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw Error(std::string("checkpoint missing field '") + key + "' in " + where);
  return *it;
}

json mat_to_json(const Mat& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.raw()}};
}

Mat mat_from_json(const json& j, size_t rows, size_t cols, const char* name) {
  const auto r = require(j, "rows", name).get<size_t>();
  const auto c = require(j, "cols", name).get<size_t>();
  if (r != rows || c != cols)
    throw Error(std::string("checkpoint tensor '") + name + "' has shape " +
                std::to_string(r) + "x" + std::to_string(c) + ", expected " +
                std::to_string(rows) + "x" + std::to_string(cols));
  Mat m(rows, cols);
  const auto& data = require(j, "data", name);
  if (data.size() != rows * cols)
    throw Error(std::string("checkpoint tensor '") + name + "' has wrong element count");
  m.raw() = data.get<Vec>();
  return m;
}

Vec vec_from_json(const json& j, size_t size, const char* name) {
  if (!j.is_array() || j.size() != size)
    throw Error(std::string("checkpoint vector '") + name + "' has wrong element count");
  return j.get<Vec>();
}

json params_to_json(const NetworkParameters& p) {
  json w;
  w["w_lin"] = mat_to_json(p.w_lin);
  w["b_lin"] = p.b_lin;
  w["w_xi"] = mat_to_json(p.w_xi);
  w["w_hi"] = mat_to_json(p.w_hi);
  w["b_i"] = p.b_i;
  w["w_xf"] = mat_to_json(p.w_xf);
  w["w_hf"] = mat_to_json(p.w_hf);
  w["b_f"] = p.b_f;
  w["w_xc"] = mat_to_json(p.w_xc);
  w["w_hc"] = mat_to_json(p.w_hc);
  w["b_c"] = p.b_c;
  w["w_xo"] = mat_to_json(p.w_xo);
  w["w_ho"] = mat_to_json(p.w_ho);
  w["b_o"] = p.b_o;
  w["w_out"] = mat_to_json(p.w_out);
  w["b_out"] = p.b_out;
  return w;
}

NetworkParameters params_from_json(const json& w, const Hyperparameters& h) {
  const auto hid = static_cast<size_t>(h.hidden_dim);
  const auto in = static_cast<size_t>(h.input_dim);
  const auto out = static_cast<size_t>(h.output_dim);
  NetworkParameters p;
  p.w_lin = mat_from_json(require(w, "w_lin", "weights"), hid, in, "w_lin");
  p.b_lin = vec_from_json(require(w, "b_lin", "weights"), hid, "b_lin");
  p.w_xi = mat_from_json(require(w, "w_xi", "weights"), hid, hid, "w_xi");
  p.w_hi = mat_from_json(require(w, "w_hi", "weights"), hid, hid, "w_hi");
  p.b_i = vec_from_json(require(w, "b_i", "weights"), hid, "b_i");
  p.w_xf = mat_from_json(require(w, "w_xf", "weights"), hid, hid, "w_xf");
  p.w_hf = mat_from_json(require(w, "w_hf", "weights"), hid, hid, "w_hf");
  p.b_f = vec_from_json(require(w, "b_f", "weights"), hid, "b_f");
  p.w_xc = mat_from_json(require(w, "w_xc", "weights"), hid, hid, "w_xc");
  p.w_hc = mat_from_json(require(w, "w_hc", "weights"), hid, hid, "w_hc");
  p.b_c = vec_from_json(require(w, "b_c", "weights"), hid, "b_c");
  p.w_xo = mat_from_json(require(w, "w_xo", "weights"), hid, hid, "w_xo");
  p.w_ho = mat_from_json(require(w, "w_ho", "weights"), hid, hid, "w_ho");
  p.b_o = vec_from_json(require(w, "b_o", "weights"), hid, "b_o");
  p.w_out = mat_from_json(require(w, "w_out", "weights"), out, hid, "w_out");
  p.b_out = vec_from_json(require(w, "b_out", "weights"), out, "b_out");
  return p;
}

json candle_to_json(const Candle& c) {
  json j{{"timestamp", c.timestamp}, {"open", c.open},  {"high", c.high},
         {"low", c.low},             {"close", c.close}};
  if (c.volume) j["volume"] = *c.volume;
  return j;
}

Candle candle_from_json(const json& j, const char* where) {
  Candle c;
  c.timestamp = require(j, "timestamp", where).get<int64_t>();
  c.open = require(j, "open", where).get<double>();
  c.high = require(j, "high", where).get<double>();
  c.low = require(j, "low", where).get<double>();
  c.close = require(j, "close", where).get<double>();
  if (j.contains("volume")) c.volume = j["volume"].get<double>();
  return c;
}

}  // namespace

std::string checkpoint_to_json(const ModelBundle& bundle) {
  json j;
  j["schema_version"] = kCheckpointSchemaVersion;

  json hy;
  hy["input_dim"] = bundle.hyper.input_dim;
  hy["hidden_dim"] = bundle.hyper.hidden_dim;
  hy["output_dim"] = bundle.hyper.output_dim;
  hy["rho"] = bundle.hyper.rho;
  hy["learning_rate"] = bundle.hyper.learning_rate;
  hy["beta1"] = bundle.hyper.beta1;
  hy["beta2"] = bundle.hyper.beta2;
  hy["epsilon"] = bundle.hyper.epsilon;
  hy["init_range"] = bundle.hyper.init_range;
  hy["max_epochs"] = bundle.hyper.max_epochs;
  hy["early_stop_delta"] = bundle.hyper.early_stop_delta;
  hy["early_stop_patience"] = bundle.hyper.early_stop_patience;
  hy["seed"] = bundle.hyper.seed;
  hy["cell_form"] = to_string(bundle.hyper.cell_form);
  hy["carry_state_across_epochs"] = bundle.hyper.carry_state_across_epochs;
  j["hyperparameters"] = hy;

  json ind;
  ind["sma_period"] = bundle.indicators.sma_period;
  ind["ema_period"] = bundle.indicators.ema_period;
  ind["dema_period"] = bundle.indicators.dema_period;
  ind["rsi_period"] = bundle.indicators.rsi_period;
  ind["roc_period"] = bundle.indicators.roc_period;
  ind["macd_fast"] = bundle.indicators.macd_fast;
  ind["macd_slow"] = bundle.indicators.macd_slow;
  ind["macd_signal"] = bundle.indicators.macd_signal;
  j["indicators"] = ind;

  j["normalization"] = json{{"names", bundle.stats.names},
                            {"min", bundle.stats.row_min},
                            {"max", bundle.stats.row_max}};
  j["last_candle"] = candle_to_json(bundle.last_candle);
  j["interval"] = bundle.interval;
  j["weights"] = params_to_json(bundle.params);
  if (bundle.optimizer) {
    j["optimizer"] = json{{"t", bundle.optimizer->t},
                          {"m", params_to_json(bundle.optimizer->m)},
                          {"v", params_to_json(bundle.optimizer->v)}};
  }
  j["provenance"] =
      json{{"config_hash", bundle.provenance.config_hash}, {"seed", bundle.provenance.seed}};
  return j.dump(2) + "\n";
}

ModelBundle checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("checkpoint is not valid JSON: ") + e.what());
  }

  const auto version = require(j, "schema_version", "checkpoint").get<int>();
  if (version != kCheckpointSchemaVersion)
    throw Error("checkpoint schema version " + std::to_string(version) +
                " is not supported (expected " + std::to_string(kCheckpointSchemaVersion) + ")");

  ModelBundle b;
  const json& hy = require(j, "hyperparameters", "checkpoint");
  b.hyper.input_dim = require(hy, "input_dim", "hyperparameters").get<int>();
  b.hyper.hidden_dim = require(hy, "hidden_dim", "hyperparameters").get<int>();
  b.hyper.output_dim = require(hy, "output_dim", "hyperparameters").get<int>();
  b.hyper.rho = require(hy, "rho", "hyperparameters").get<int>();
  b.hyper.learning_rate = require(hy, "learning_rate", "hyperparameters").get<double>();
  b.hyper.beta1 = require(hy, "beta1", "hyperparameters").get<double>();
  b.hyper.beta2 = require(hy, "beta2", "hyperparameters").get<double>();
  b.hyper.epsilon = require(hy, "epsilon", "hyperparameters").get<double>();
  b.hyper.init_range = require(hy, "init_range", "hyperparameters").get<double>();
  b.hyper.max_epochs = require(hy, "max_epochs", "hyperparameters").get<int>();
  b.hyper.early_stop_delta = require(hy, "early_stop_delta", "hyperparameters").get<double>();
  b.hyper.early_stop_patience =
      require(hy, "early_stop_patience", "hyperparameters").get<int>();
  b.hyper.seed = require(hy, "seed", "hyperparameters").get<uint64_t>();
  b.hyper.cell_form =
      cell_form_from_string(require(hy, "cell_form", "hyperparameters").get<std::string>());
  b.hyper.carry_state_across_epochs =
      require(hy, "carry_state_across_epochs", "hyperparameters").get<bool>();

  const json& ind = require(j, "indicators", "checkpoint");
  b.indicators.sma_period = require(ind, "sma_period", "indicators").get<int>();
  b.indicators.ema_period = require(ind, "ema_period", "indicators").get<int>();
  b.indicators.dema_period = require(ind, "dema_period", "indicators").get<int>();
  b.indicators.rsi_period = require(ind, "rsi_period", "indicators").get<int>();
  b.indicators.roc_period = require(ind, "roc_period", "indicators").get<int>();
  b.indicators.macd_fast = require(ind, "macd_fast", "indicators").get<int>();
  b.indicators.macd_slow = require(ind, "macd_slow", "indicators").get<int>();
  b.indicators.macd_signal = require(ind, "macd_signal", "indicators").get<int>();

  const json& norm = require(j, "normalization", "checkpoint");
  b.stats.names = require(norm, "names", "normalization").get<std::vector<std::string>>();
  b.stats.row_min = require(norm, "min", "normalization").get<Vec>();
  b.stats.row_max = require(norm, "max", "normalization").get<Vec>();
  if (b.stats.row_min.size() != b.stats.row_max.size())
    throw Error("normalization min/max length mismatch in checkpoint");

  b.last_candle = candle_from_json(require(j, "last_candle", "checkpoint"), "last_candle");
  b.interval = require(j, "interval", "checkpoint").get<int64_t>();
  b.params = params_from_json(require(j, "weights", "checkpoint"), b.hyper);

  if (j.contains("optimizer")) {
    const json& opt = j["optimizer"];
    AdamState a;
    a.t = require(opt, "t", "optimizer").get<int64_t>();
    a.m = params_from_json(require(opt, "m", "optimizer"), b.hyper);
    a.v = params_from_json(require(opt, "v", "optimizer"), b.hyper);
    b.optimizer = std::move(a);
  }

  const json& prov = require(j, "provenance", "checkpoint");
  b.provenance.config_hash = require(prov, "config_hash", "provenance").get<std::string>();
  b.provenance.seed = require(prov, "seed", "provenance").get<uint64_t>();
  return b;
}

void save_checkpoint(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path);
  out << checkpoint_to_json(bundle);
  if (!out) throw Error("failed writing checkpoint: " + path);
}

ModelBundle load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace ccast
