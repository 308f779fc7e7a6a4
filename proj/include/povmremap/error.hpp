#pragma once

#include <stdexcept>
#include <string>

namespace povmremap {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyImage : std::runtime_error {
    explicit EmptyImage(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidParams : std::runtime_error {
    explicit InvalidParams(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooFewDistinctLevels : std::runtime_error {
    explicit TooFewDistinctLevels(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmDiverged : std::runtime_error {
    explicit EmDiverged(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidGamma : std::runtime_error {
    explicit InvalidGamma(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooSmall : std::runtime_error {
    explicit TooSmall(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroInputEntropy : std::runtime_error {
    explicit ZeroInputEntropy(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexOutOfRange : std::runtime_error {
    explicit IndexOutOfRange(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace povmremap
