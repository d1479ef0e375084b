#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "barylab/core.hpp"

namespace barylab {

enum class PropertyId {
  epsilon_standard,
  b_associative,
  b_assoc_simplified,
  b_assoc_form_ii,
  b_assoc_form_iii,
  b_assoc_form_iv,
  b_preassociative,
  b_preassoc_two_eq,
  b_preassoc_simplified,
  associative,
  preassociative,
  idempotent,
  arity_wise_range_idempotent,
  arity_wise_quasi_range_idempotent,
  symmetric,
  strictly_increasing,
  continuous_sampled,
};

/// A checkable property. `arity` is used by symmetric(n), strictly_increasing(n)
/// and continuous_sampled(n) only.
struct Property {
  PropertyId id;
  std::size_t arity = 0;

  friend bool operator==(const Property&, const Property&) = default;
};

std::string to_string(Property p);
/// Parses names such as "b_associative" or "symmetric(3)".
std::optional<Property> parse_property(std::string_view text);

enum class Status { pass, fail, unsupported };
enum class SearchMode { exhaustive, sampled };

std::string_view to_string(Status s);
std::string_view to_string(SearchMode m);

struct SearchSpace {
  SearchMode mode = SearchMode::exhaustive;
  std::size_t max_len = 0;
  std::size_t alphabet_size = 0;
  std::size_t samples = 0;
  std::uint64_t instances = 0;
  std::uint64_t seed = 0;
};

/// A concrete violation. Which fields are populated depends on the property;
/// lhs/rhs are nullopt when a side is undefined (a value outside the domain).
struct Witness {
  Str x, y, y_prime, z;
  std::optional<Str> x_prime;
  std::optional<Str> z_prime;
  std::optional<CoValue> lhs, rhs;
  std::string note;
};

struct PropertyReport {
  std::string property;
  Status status = Status::pass;
  SearchSpace space;
  std::optional<Witness> witness;
  std::string note;
  /// A proved agreement or implication did not hold.
  bool critical = false;
  /// The implication checked had a false hypothesis on the space.
  bool vacuous = false;
  bool budget_exceeded = false;
  std::chrono::nanoseconds elapsed{0};

  bool passed() const noexcept { return status == Status::pass; }
  bool failed() const noexcept { return status == Status::fail; }
};

}  // namespace barylab
