#pragma once

#include <stdexcept>
#include <string>

namespace spinlink {

// Error categories, mapped to CLI exit codes:
//   ConfigError    -> 2  (invalid parameters, malformed config)
//   NumericalError -> 3  (integration failure, divergent series, ...)
//   IoError        -> 4  (unreadable config, unwritable output)
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;
inline constexpr int kExitIoError = 4;

} // namespace spinlink
