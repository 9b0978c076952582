// Exception taxonomy shared by all modules. The CLI maps these onto exit
// codes: ConfigError -> 2, DataError -> 3, NumericError -> 4.

#pragma once

#include <stdexcept>
#include <string>

namespace nlevy {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument to a mathematical operation (non-finite input, out-of-range
// probability, mgf argument outside the convergence strip, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Model/state persistence problems (bad magic, version, checksum).
struct PersistenceError : std::runtime_error {
    explicit PersistenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nlevy
