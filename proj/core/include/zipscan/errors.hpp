#pragma once

#include <stdexcept>
#include <string>

namespace zipscan {

/// Malformed or inconsistent input: bad files, misaligned vectors, invalid
/// indices, contract violations on user-supplied data.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Input on which the requested statistic is undefined (no cases anywhere,
/// every region a structural zero, zero at-risk population, ...).
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace zipscan
