#ifndef GRAPHSPACE_ERRORS_HPP
#define GRAPHSPACE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace graphspace {

/// Malformed input: bad dimensions, broken invariants, invalid documents.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical routine failed to produce a usable result.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

namespace internal {

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ValidationError(message);
    }
}

}  // namespace internal

}  // namespace graphspace

#endif
