#pragma once

#include <cstdint>
#include <string>

namespace ccast {

// Stamped into every artifact so a file can always be traced back to the
// exact configuration and seed that produced it. Wall-clock timestamps stay
// out of artifacts (they live in the .meta.json side files) so re-runs are
// byte-identical.
struct Provenance {
  std::string config_hash;
  uint64_t seed = 0;

  bool operator==(const Provenance&) const = default;
};

}  // namespace ccast
