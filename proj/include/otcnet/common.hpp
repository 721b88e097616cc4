#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace otcnet {

/// Monetary amounts are kept in integer millions of USD so that panel-wide
/// sums stay exact; statistics convert to double at computation boundaries.
using Currency = std::int64_t;

/// Malformed input data (CSV structure, unparseable cells, bad labels).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that parses but violates a documented contract (schema, invariants,
/// merge safety, out-of-range parameters).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad run configuration (missing files, inconsistent selectors).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace otcnet
