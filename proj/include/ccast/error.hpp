#pragma once

#include <stdexcept>
#include <string>

namespace ccast {

// Raised for every contract violation in the library. The CLI catches it and
// maps it to exit code 1 with a single-line message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ccast
