#pragma once

#include <stdexcept>
#include <string>

namespace roughness {

/// Broad failure categories. The CLI maps each one to its own exit code.
enum class ErrorKind { usage, config, schema, data };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Bad command-line usage: missing or conflicting arguments, missing paths.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// Invalid parameter or configuration value.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// A document (model file, config, log file) does not match its schema.
class SchemaError : public Error {
public:
    SchemaError(const std::string& field, const std::string& what)
        : Error(ErrorKind::schema, field + ": " + what), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Input data cannot support the requested computation.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ExtrapolationError : public DataError {
public:
    using DataError::DataError;
};

class UnscorablePatchError : public DataError {
public:
    using DataError::DataError;
};

class TooShortError : public DataError {
public:
    using DataError::DataError;
};

class TrainingDataError : public DataError {
public:
    using DataError::DataError;
};

class EvaluationError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace roughness
