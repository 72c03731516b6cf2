#pragma once

#include <stdexcept>
#include <string>

namespace slap {

// Base of every error raised by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// model
class DegenerateFields : public Error {
public:
    using Error::Error;
};

// analytics
class NoThreshold : public Error {
public:
    using Error::Error;
};

class NotRealValued : public Error {
public:
    using Error::Error;
};

class InfeasibleGeometry : public Error {
public:
    using Error::Error;
};

class Unachievable : public Error {
public:
    using Error::Error;
};

// dynamics
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double time_s)
        : Error(what), time_(time_s) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

// scan
class NoPeak : public Error {
public:
    using Error::Error;
};

class AmbiguousPeak : public Error {
public:
    using Error::Error;
};

class WindowNotCovered : public Error {
public:
    using Error::Error;
};

// configuration; every one of these carries the offending field path
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnitError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace slap
