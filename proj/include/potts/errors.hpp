#pragma once

#include <stdexcept>
#include <string>

namespace potts {

/// Raised when caller-supplied input violates a documented precondition
/// (bad dimensions, out-of-range parameters, malformed files).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace potts
