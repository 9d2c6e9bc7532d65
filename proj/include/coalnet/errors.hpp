#pragma once

#include <stdexcept>
#include <string>

namespace coalnet {

struct ConnectivityError : std::runtime_error {
    explicit ConnectivityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IndexError : std::out_of_range {
    explicit IndexError(const std::string& msg) : std::out_of_range(msg) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct GenericityError : std::runtime_error {
    explicit GenericityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct JetError : std::runtime_error {
    explicit JetError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RankError : std::runtime_error {
    explicit RankError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConsistencyError : std::runtime_error {
    explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace coalnet
