#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vibq {

/// Thrown when an argument violates an operation's precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation would exceed its memory budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t required_bytes)
      : std::runtime_error(what + " (requires " + std::to_string(required_bytes) + " bytes)"),
        required_bytes_(required_bytes) {}

  std::size_t required_bytes() const noexcept { return required_bytes_; }

 private:
  std::size_t required_bytes_;
};

}  // namespace vibq
