#pragma once

#include <stdexcept>
#include <string>

namespace stylexfer {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unreadable input file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (missing file, unwritable directory).
class IoError : public Error {
public:
    using Error::Error;
};

/// Mesh connectivity violates a required topological property.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Bad configuration value or flag.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (singular system, degenerate geometry).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Precondition on an operation's arguments was not met.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An error raised inside a pipeline stage, tagged with the stage name.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace stylexfer
