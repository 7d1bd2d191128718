#pragma once

#include <stdexcept>
#include <string>

namespace tmine {

// Error categories map 1:1 onto CLI exit codes: io_error -> 2,
// input_error -> 3, numeric_error -> 4.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tmine
