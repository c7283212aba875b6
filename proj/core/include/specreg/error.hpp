#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace specreg {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input exceeds the documented workspace limits.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// No singular value survives the rank tolerance.
class EmptySpectrumError : public Error {
public:
    EmptySpectrumError() : Error("empty spectrum: no singular value above the rank tolerance") {}
};

/// Iterative kernels that fail to converge, or other non-finite results.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A data profile with Pi_n = 0 where a fit divides by it.
class AssumptionError : public Error {
public:
    explicit AssumptionError(std::size_t mode)
        : Error("data variance positivity violated: Pi_n = 0 at mode n = " + std::to_string(mode)),
          mode_(mode) {}

    /// 1-based mode index.
    std::size_t mode() const noexcept { return mode_; }

private:
    std::size_t mode_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed binary or text input. `offset` is a byte offset for binary
/// files and a 1-based line number for text formats.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnsupportedVersionError : public ParseError {
public:
    UnsupportedVersionError(std::uint32_t version, std::size_t offset)
        : ParseError("unsupported version " + std::to_string(version), offset), version_(version) {}

    std::uint32_t version() const noexcept { return version_; }

private:
    std::uint32_t version_;
};

/// Experiment configuration rejected. `field` is a JSON-pointer-like path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace specreg
