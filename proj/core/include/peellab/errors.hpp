#pragma once

#include <stdexcept>
#include <string>

namespace peellab {

struct CalibrationFailed : std::runtime_error {
    explicit CalibrationFailed(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidPerimeter : std::invalid_argument {
    explicit InvalidPerimeter(const std::string& what) : std::invalid_argument(what) {}
};

struct InvalidState : std::logic_error {
    explicit InvalidState(const std::string& what) : std::logic_error(what) {}
};

struct WorkBudgetExceeded : std::runtime_error {
    explicit WorkBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveRate : std::invalid_argument {
    explicit NonPositiveRate(const std::string& what) : std::invalid_argument(what) {}
};

struct UnreachableB : std::invalid_argument {
    explicit UnreachableB(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptySample : std::invalid_argument {
    explicit EmptySample(const std::string& what) : std::invalid_argument(what) {}
};

struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string key_, const std::string& what)
        : std::runtime_error(what), key(std::move(key_)) {}
};

} // namespace peellab
