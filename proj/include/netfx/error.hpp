#pragma once

#include <stdexcept>
#include <string>

namespace netfx {

// CLI exit codes: 0 success, 2 config/input error, 3 identifiability error,
// 4 numerical failure.
enum class ExitCode : int {
    ok = 0,
    failure = 1,
    config = 2,
    identifiability = 3,
    numerical = 4,
};

class Error : public std::runtime_error {
public:
    Error(std::string msg, ExitCode code)
        : std::runtime_error(std::move(msg)), code_(code) {}
    ExitCode exit_code() const noexcept { return code_; }

private:
    ExitCode code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string msg) : Error(std::move(msg), ExitCode::config) {}
};

class GraphError : public Error {
public:
    explicit GraphError(std::string msg) : Error(std::move(msg), ExitCode::config) {}
};

class DataError : public Error {
public:
    explicit DataError(std::string msg) : Error(std::move(msg), ExitCode::config) {}
};

class IdentifiabilityError : public Error {
public:
    explicit IdentifiabilityError(std::string msg)
        : Error(std::move(msg), ExitCode::identifiability) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(std::string msg) : Error(std::move(msg), ExitCode::numerical) {}
};

} // namespace netfx
