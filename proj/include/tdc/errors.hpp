#ifndef TDC_ERRORS_HPP
#define TDC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tdc {

/// Problems with input data: unreadable files, malformed rows, unknown
/// attributes, empty splits. CLI maps these to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric failures that indicate a bug or a diverged run: non-finite
/// gradients, sentinel values leaking past the first pooling. Exit code 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad key, out-of-range hyperparameter). Exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tdc

#endif
