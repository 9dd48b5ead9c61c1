#pragma once

#include <stdexcept>
#include <string>

namespace qfc {

// Raised when an integration or linear solve breaks down (singular system,
// divergent trajectory). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an operation needs a nonzero pump to be well defined.
class DegeneratePumpError : public std::domain_error {
public:
    explicit DegeneratePumpError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace qfc
