#pragma once

#include <stdexcept>
#include <string>

namespace sfd {

/// Bad sizes, indices or configuration values passed by the caller.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row or column index outside the design.
class IndexOutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Malformed design / report file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Design too small or degenerate for the requested computation.
class DegenerateDesign : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Incremental state no longer tracks the design it is applied to.
class StaleState : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sfd
