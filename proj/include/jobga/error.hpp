#ifndef JOBGA_ERROR_HPP
#define JOBGA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace jobga {

// Malformed input document (bad JSON, wrong field types, missing keys).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Well-formed input describing an invalid build or history.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reading or writing a file failed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke an operation's precondition, or an internal invariant failed.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void expects(bool condition, const std::string& what) {
    if (!condition) {
        throw ContractViolation(what);
    }
}

} // namespace jobga

#endif // JOBGA_ERROR_HPP
