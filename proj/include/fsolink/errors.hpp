#pragma once

#include <stdexcept>
#include <string>

namespace fsolink {

// Error families map onto distinct process exit codes in the CLI:
// config 2, divergence 3, I/O 4.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, int iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

// Model file problems, each reported as its own type.
class ModelFileError : public IoError {
public:
    using IoError::IoError;
};

class ModelFileMalformed : public ModelFileError {
public:
    using ModelFileError::ModelFileError;
};

class ModelFileVersionMismatch : public ModelFileError {
public:
    using ModelFileError::ModelFileError;
};

class ModelFileShapeError : public ModelFileError {
public:
    using ModelFileError::ModelFileError;
};

}  // namespace fsolink
