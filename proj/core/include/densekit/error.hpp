#pragma once

#include <stdexcept>
#include <string>

namespace densekit {

/// Malformed or inconsistent input data (bad documents, unknown ids, ...).
/// Precondition violations on arguments use std::invalid_argument instead.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace densekit
