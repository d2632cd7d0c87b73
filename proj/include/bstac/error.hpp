#pragma once

#include <stdexcept>
#include <string>

namespace bstac {

// Bad input data: unreadable CSV, malformed cells, invalid splits.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid trainer/CLI configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Corrupt, truncated or incompatible model file.
class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bstac
