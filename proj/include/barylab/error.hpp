#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace barylab {

enum class ErrorCode {
  arity_exceeded,
  arity_mismatch,
  domain_mismatch,
  unknown_name,
  generator_not_invertible,
  format,
  invalid_argument,
  unsupported,
  empty_domain,
  not_b_preassociative,
  not_quasi_range_idempotent,
  diagonal_not_injective,
  degenerate_fit,
  budget_exceeded,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace barylab
