#ifndef TLP_ERRORS_HPP_
#define TLP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace tlp {

// Dimension or shape disagreement between operands.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Domain violation: negative weight, asymmetric snapshot, bad config value.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed input file; message carries file name and line number.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse, e.g. backward pass without a cached forward pass.
class UsageError : public std::logic_error {
public:
    explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace tlp

#endif  // TLP_ERRORS_HPP_
