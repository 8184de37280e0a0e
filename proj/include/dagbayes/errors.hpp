#pragma once

#include <stdexcept>
#include <string>

namespace dagbayes {

// Malformed input files: graph specs, counts/trajectory/prior CSVs,
// ill-formed CLI query strings. Messages carry line numbers where known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures: path-count cap exceeded, zero denominators.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dagbayes
