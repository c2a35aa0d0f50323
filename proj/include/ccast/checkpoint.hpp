#pragma once

#include <optional>
#include <string>

#include "ccast/candle.hpp"
#include "ccast/pipeline.hpp"
#include "ccast/provenance.hpp"
#include "ccast/training.hpp"

namespace ccast {

// Everything needed to run a trained network against fresh data: the weights,
// the hyperparameters that shaped them, and the frozen normalization ranges
// plus the candle the next prediction chains from.
struct ModelBundle {
  Hyperparameters hyper;
  IndicatorConfig indicators;  // feature settings the stats were computed with
  NetworkParameters params;
  NormalizationStats stats;
  Candle last_candle;
  int64_t interval = 3600;
  std::optional<AdamState> optimizer;
  Provenance provenance;

  bool operator==(const ModelBundle&) const = default;
};

inline constexpr int kCheckpointSchemaVersion = 1;

// JSON with named row-major weight arrays. Numbers are rendered so that a
// load of the output restores every double bit for bit.
std::string checkpoint_to_json(const ModelBundle& bundle);
ModelBundle checkpoint_from_json(const std::string& text);

void save_checkpoint(const ModelBundle& bundle, const std::string& path);
ModelBundle load_checkpoint(const std::string& path);

}  // namespace ccast
