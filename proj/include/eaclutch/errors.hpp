#pragma once

#include <stdexcept>
#include <string>

namespace eaclutch {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Iterative method gave up. partial holds the last estimate.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, double partial)
        : Error(what), partial_(partial) {}
    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double t) : Error(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class DegenerateFit : public Error {
public:
    using Error::Error;
};

class NoEquilibrium : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class NoRelease : public Error {
public:
    using Error::Error;
};

// Bad configuration value; field is the dot path of the offending entry.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& msg)
        : Error(field + ": " + msg), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace eaclutch
