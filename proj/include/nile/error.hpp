#pragma once

#include <stdexcept>
#include <string>

namespace nile {

/// Raised when a basin, environment or optimizer configuration is invalid.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an operation is called outside its contract (wrong dimension,
/// stepping a finished episode, ...).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace nile
