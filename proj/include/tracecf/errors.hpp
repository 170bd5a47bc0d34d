#pragma once

#include <stdexcept>
#include <string>

namespace tracecf {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or unreadable input (CSV/XES/JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a data contract
/// (e.g. a static attribute changing value within one case).
class IntegrityError : public Error {
public:
    using Error::Error;
};

class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

class EmptyModelError : public Error {
public:
    using Error::Error;
};

class EmptyLogError : public Error {
public:
    using Error::Error;
};

/// Rejection-sampling budget exhausted while synthesizing a log.
class SynthesisError : public Error {
public:
    using Error::Error;
};

/// Feature vector or attribute data inconsistent with an encoding schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Training data unusable (single class, too few samples).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (e.g. adapted GA mode without a Declare model).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tracecf
