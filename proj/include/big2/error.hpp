#pragma once

#include <stdexcept>
#include <string>

namespace big2 {

// Raised when a caller breaks an operation's precondition (illegal move,
// terminal state queried for actions, misaligned buffers, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid or unreadable configuration / input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical fault during training (non-finite loss, gradient or activation).
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const char* what) {
  if (!condition) throw ContractViolation(what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace big2
