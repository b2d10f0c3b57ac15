#pragma once

#include <stdexcept>
#include <string>

namespace fedtrip {

// Two parameter vectors with different layouts were combined, or a batch
// does not match the model dimensions.
class LayoutError : public std::runtime_error {
public:
    explicit LayoutError(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called with arguments that are never valid (empty batch,
// zero-length vector, ...).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// A run configuration is self-inconsistent (k > n, weights that do not sum
// to one, unknown method name, more clusters than classes, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// The dataset cannot supply the requested number of samples.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// A file does not conform to its declared on-disk format.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// An internal protocol rule was broken (e.g. a participation gap that is
// not positive).
class LogicError : public std::runtime_error {
public:
    explicit LogicError(const std::string& what) : std::runtime_error(what) {}
};

// A linear solve met a matrix that is not positive definite.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fedtrip
