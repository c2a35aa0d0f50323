#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "ccast/checkpoint.hpp"
#include "ccast/error.hpp"
#include "ccast/rng.hpp"
#include "oracles.hpp"

using namespace ccast;

namespace {

ModelBundle sample_bundle(bool with_optimizer) {
  Hyperparameters h;
  h.input_dim = 11;
  h.hidden_dim = 6;
  h.rho = 12;
  h.seed = 5;
  h.cell_form = CellForm::reduced;
  h.carry_state_across_epochs = true;

  ModelBundle b;
  b.hyper = h;
  b.indicators.rsi_period = 21;
  b.params = init_params(h);
  b.stats.names = feature_names();
  Rng rng(8);
  for (size_t i = 0; i < kFeatureCount; ++i) {
    const double lo = rng.uniform(-2.0, 0.0);
    b.stats.row_min.push_back(lo);
    b.stats.row_max.push_back(lo + rng.uniform(0.5, 2.0));
  }
  b.last_candle = Candle{1546300800, 100.0, 101.25, 99.5, 100.75, 1234.5};
  b.interval = 3600;
  if (with_optimizer) {
    AdamState a = init_adam(h);
    a.t = 17;
    a.m.w_lin(0, 0) = 0.25;
    a.v.b_out[1] = 1e-9;
    b.optimizer = a;
  }
  b.provenance = Provenance{"00000000deadbeef", 42};
  return b;
}

}  // namespace

TEST_CASE("checkpoints round-trip bit for bit") {
  for (bool with_optimizer : {false, true}) {
    CAPTURE(with_optimizer);
    const ModelBundle b = sample_bundle(with_optimizer);
    const ModelBundle back = checkpoint_from_json(checkpoint_to_json(b));
    CHECK(back == b);
  }
}

TEST_CASE("checkpoints round-trip through a file") {
  const ModelBundle b = sample_bundle(true);
  const std::string path =
      (std::filesystem::temp_directory_path() / "ccast_checkpoint_test.json").string();
  save_checkpoint(b, path);
  CHECK(load_checkpoint(path) == b);
  std::remove(path.c_str());
}

TEST_CASE("awkward doubles survive the json round trip") {
  ModelBundle b = sample_bundle(false);
  b.params.w_lin(0, 0) = 0.1 + 0.2;  // classic non-representable sum
  b.params.w_lin(0, 1) = 1e-300;
  b.params.b_lin[0] = -0.0;
  b.stats.row_min[0] = 1.0 / 3.0;
  const ModelBundle back = checkpoint_from_json(checkpoint_to_json(b));
  CHECK(back == b);
}

TEST_CASE("missing fields are named in the error") {
  const std::string text = checkpoint_to_json(sample_bundle(false));
  auto j = nlohmann::json::parse(text);
  j["weights"].erase("w_out");
  try {
    checkpoint_from_json(j.dump());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("w_out") != std::string::npos);
  }
}

TEST_CASE("schema version mismatches are rejected") {
  auto j = nlohmann::json::parse(checkpoint_to_json(sample_bundle(false)));
  j["schema_version"] = kCheckpointSchemaVersion + 1;
  CHECK_THROWS_AS(checkpoint_from_json(j.dump()), Error);
}

TEST_CASE("tensor shape mismatches are rejected") {
  auto j = nlohmann::json::parse(checkpoint_to_json(sample_bundle(false)));
  j["weights"]["w_out"]["data"].push_back(0.5);
  CHECK_THROWS_AS(checkpoint_from_json(j.dump()), Error);
}

TEST_CASE("malformed json is rejected") {
  CHECK_THROWS_AS(checkpoint_from_json("{not json"), Error);
  CHECK_THROWS_AS(checkpoint_from_json("[]"), Error);
}
