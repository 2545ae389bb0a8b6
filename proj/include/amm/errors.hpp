#pragma once

#include <stdexcept>

namespace amm {

// Malformed or unusable input data (missing file, bad CSV row, empty series).
// The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation produced or hit non-finite state.  CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace amm
