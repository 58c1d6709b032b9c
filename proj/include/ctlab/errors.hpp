#pragma once

#include <stdexcept>
#include <string>

namespace ctlab {

enum class ErrorKind {
  invalid_argument,
  unsupported_direction,
  no_smooth_structure,
  unknown_label,
  mismatched_variants,
  insufficient_window,
  empty_grid,
  degenerate_fit,
  non_locally_constant,
  no_unstable_structure,
  invalid_config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::unsupported_direction: return "unsupported-direction";
    case ErrorKind::no_smooth_structure: return "no-smooth-structure";
    case ErrorKind::unknown_label: return "unknown-label";
    case ErrorKind::mismatched_variants: return "mismatched-variants";
    case ErrorKind::insufficient_window: return "insufficient-window";
    case ErrorKind::empty_grid: return "empty-grid";
    case ErrorKind::degenerate_fit: return "degenerate-fit";
    case ErrorKind::non_locally_constant: return "non-locally-constant";
    case ErrorKind::no_unstable_structure: return "no-unstable-structure";
    case ErrorKind::invalid_config: return "invalid-config";
  }
  return "unknown";
}

}  // namespace ctlab
