#ifndef KFA_ERRORS_HPP
#define KFA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kfa {

/// Caller passed something malformed: bad sizes, non-finite values,
/// unknown column names, infeasible configuration. CLI exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// The data are valid but degenerate for the requested computation
/// (identical groups, zero median distance, base rate 0 or 1).
/// CLI exit code 3.
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace kfa

#endif
