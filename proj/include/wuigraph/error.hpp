#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wuigraph {

/// Bad input: malformed files, out-of-domain arguments, schema violations.
/// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failure while computing on valid input (divergence, non-convergence).
/// The CLI maps this to exit code 2.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Warnings go to stderr unless silenced; the counter lets tests assert a
// code path was warning-free.
void warn(const std::string& message);
std::size_t warning_count();
void set_warnings_silenced(bool silenced);

}  // namespace wuigraph
