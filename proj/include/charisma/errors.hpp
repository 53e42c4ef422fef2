#pragma once

#include <stdexcept>
#include <string>

namespace charisma {

// Domain error hierarchy. The CLI maps any CharismaError to exit code 1;
// usage errors (bad flags) are handled by the argument parser and exit 2.
class CharismaError : public std::runtime_error {
public:
    explicit CharismaError(const std::string& msg) : std::runtime_error(msg) {}
};

class ArgumentError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class ParseError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class SchemaError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class IntegrityError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class IoError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class ConfigError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class GenerationError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class CheckpointError : public CharismaError {
public:
    using CharismaError::CharismaError;
};

class DivergenceError : public CharismaError {
public:
    explicit DivergenceError(const std::string& msg, int epoch)
        : CharismaError(msg), epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

}  // namespace charisma
