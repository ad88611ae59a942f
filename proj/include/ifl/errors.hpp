#pragma once

#include <stdexcept>

namespace ifl {

// Configuration problems; the CLI maps these to exit code 2 (runtime faults
// exit with 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ifl
