#ifndef OKDV_ERRORS_HPP
#define OKDV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace okdv {

// Bad user input: incompatible spaces, malformed bounds, unparsable fixtures.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// A coefficient was requested outside the region the series certifies.
// Distinct from a true zero.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& m) : std::runtime_error(m) {}
};

// A solver or identity that the theory guarantees failed to close; this
// always indicates an implementation bug, never bad input.
struct InternalInconsistency : std::logic_error {
    explicit InternalInconsistency(const std::string& m) : std::logic_error(m) {}
};

}  // namespace okdv

#endif
