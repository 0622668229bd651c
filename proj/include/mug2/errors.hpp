#ifndef MUG2_ERRORS_HPP
#define MUG2_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mug2 {

/// Input outside the mathematical domain of an operation (v >= 1, y outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration file or CSV could not be parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally invalid input table (overlapping bins, missing columns, ...).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A required configuration entry is missing or violates its invariant.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mug2

#endif
