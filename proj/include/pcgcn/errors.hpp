#pragma once

#include <stdexcept>
#include <string>

namespace pcgcn {

/// Invalid configuration (bad key, out-of-range value). CLI exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent dataset input. CLI exit code 3.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite loss during training. CLI exit code 4.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Internal shape mismatch between tensors; indicates a programming error.
struct ShapeError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace pcgcn
