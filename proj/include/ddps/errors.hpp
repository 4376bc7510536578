#pragma once

#include <stdexcept>

namespace ddps {

// Invalid user input: bad config values, malformed files, violated preconditions.
// The CLI maps this to exit code 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation lost numerical validity: NaN states, overflow in powering,
// divergent fits. The CLI maps this to exit code 2.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ddps
