#pragma once

#include <stdexcept>
#include <string>

namespace qcylab {

struct MultiTermPower : std::domain_error {
    explicit MultiTermPower(const std::string& what) : std::domain_error(what) {}
};

struct UnsupportedArgument : std::domain_error {
    explicit UnsupportedArgument(const std::string& what) : std::domain_error(what) {}
};

struct DivergentIntegral : std::domain_error {
    explicit DivergentIntegral(const std::string& what) : std::domain_error(what) {}
};

struct PiResidue : std::logic_error {
    explicit PiResidue(const std::string& what) : std::logic_error(what) {}
};

struct EmptySpace : std::logic_error {
    explicit EmptySpace(const std::string& what) : std::logic_error(what) {}
};

struct QuadratureNonConvergent : std::runtime_error {
    explicit QuadratureNonConvergent(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace qcylab
