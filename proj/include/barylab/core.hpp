#pragma once

// Strings over a domain, *-ary functions with an epsilon-augmented codomain,
// and their diagonal sections.

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "barylab/error.hpp"

namespace barylab {

using Point = std::vector<double>;

/// A domain element: a real number, a symbolic label or a point of R^d.
using Atom = std::variant<double, std::string, Point>;

/// A finite string over a domain. The empty vector is the empty string.
using Str = std::vector<Atom>;

struct Tolerance {
  double rel = 1e-9;
  double abs = 1e-12;
};

bool approx_equal(double a, double b, Tolerance tol = {});
bool approx_equal(const Atom& a, const Atom& b, Tolerance tol = {});

std::string to_string(const Atom& a);
std::string to_string(std::span<const Atom> s);

/// A codomain value: either an atom or the empty string epsilon.
class CoValue {
 public:
  CoValue() = default;
  CoValue(Atom a) : value_(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  CoValue(double a) : value_(Atom{a}) {}     // NOLINT(google-explicit-constructor)

  static CoValue epsilon() { return {}; }

  bool is_epsilon() const noexcept { return !value_.has_value(); }
  const Atom& value() const;
  /// The value as a real number; throws when epsilon or not a scalar.
  double real() const;

  friend bool operator==(const CoValue&, const CoValue&) = default;

 private:
  std::optional<Atom> value_;
};

bool approx_equal(const CoValue& a, const CoValue& b, Tolerance tol = {});
std::string to_string(const CoValue& v);

Str concat(std::span<const Atom> a, std::span<const Atom> b);
Str concat(std::span<const Atom> a, std::span<const Atom> b, std::span<const Atom> c);
/// n concatenated copies of x; power(x, 0) is the empty string.
Str power(std::span<const Atom> x, std::size_t n);
/// v^n for a codomain value: the atom repeated n times, or the empty string when v is epsilon.
Str power(const CoValue& v, std::size_t n);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  static Interval real_line() { return {}; }
  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), false, false}; }
  static Interval non_negative() { return {0.0, std::numeric_limits<double>::infinity(), true, false}; }

  bool contains(double x) const;
  bool nontrivial() const { return lo < hi; }
  std::string describe() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

class DomainDesc {
 public:
  enum class Kind { finite, real_interval, vector_space };

  static DomainDesc finite(std::vector<Atom> elements);
  static DomainDesc interval(Interval iv);
  static DomainDesc reals() { return interval(Interval::real_line()); }
  static DomainDesc vectors(std::size_t dimension);

  Kind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == Kind::finite; }

  /// Elements of a finite domain, in their canonical order.
  const std::vector<Atom>& elements() const;
  const Interval& interval() const;
  std::size_t dimension() const;

  bool contains(const Atom& a) const;
  /// Position of `a` among the elements of a finite domain.
  std::optional<std::size_t> index_of(const Atom& a) const;
  std::string describe() const;

  friend bool operator==(const DomainDesc&, const DomainDesc&) = default;

 private:
  DomainDesc() = default;

  Kind kind_ = Kind::real_interval;
  std::vector<Atom> elements_;
  Interval interval_;
  std::size_t dimension_ = 0;
};

/// All strings of length 0..max_len over an alphabet, indexed in
/// (length, lexicographic) order. Index 0 is the empty string.
class StringSpace {
 public:
  StringSpace(std::vector<Atom> alphabet, std::size_t max_len);

  const std::vector<Atom>& alphabet() const noexcept { return alphabet_; }
  std::size_t max_len() const noexcept { return max_len_; }
  std::size_t size() const noexcept { return offsets_.back(); }
  std::size_t offset(std::size_t len) const { return offsets_.at(len); }
  std::size_t count(std::size_t len) const { return offsets_.at(len + 1) - offsets_.at(len); }
  std::size_t length_of(std::size_t index) const;

  Str at(std::size_t index) const;
  void codes(std::size_t index, std::vector<std::size_t>& out) const;
  std::size_t index_of_codes(std::span<const std::size_t> codes) const;
  /// Index of a string whose atoms are all (exactly) alphabet atoms.
  std::optional<std::size_t> index_of(std::span<const Atom> s) const;
  std::optional<std::size_t> code_of(const Atom& a) const;

 private:
  std::vector<Atom> alphabet_;
  std::size_t max_len_;
  std::vector<std::size_t> offsets_;
};

using Evaluator = std::function<CoValue(std::span<const Atom>)>;

/// For arity n and a value y, some u with F(u^n) = y when y lies in the range
/// of the diagonal section (a quasi-inverse of the diagonal section).
using DiagonalInverse = std::function<std::optional<Atom>(std::size_t, const CoValue&)>;

/// A *-ary function F: X* -> Y u {epsilon}.
class VarFn {
 public:
  static VarFn closed_form(std::string name, nlohmann::json params, DomainDesc domain,
                           DomainDesc codomain, Evaluator evaluate,
                           std::optional<std::size_t> max_arity = std::nullopt,
                           CoValue default_value = CoValue::epsilon());

  /// entries are indexed like StringSpace(domain.elements(), max_arity); entry 0 is the default.
  static VarFn tabulated(DomainDesc domain, DomainDesc codomain, std::size_t max_arity,
                         std::vector<CoValue> entries, std::string name = "table");

  CoValue operator()(std::span<const Atom> x) const;
  CoValue operator()(std::initializer_list<Atom> x) const {
    return (*this)(std::span<const Atom>(x.begin(), x.size()));
  }

  const std::string& name() const noexcept { return name_; }
  const nlohmann::json& params() const noexcept { return params_; }
  const DomainDesc& domain() const noexcept { return domain_; }
  const DomainDesc& codomain() const noexcept { return codomain_; }
  std::optional<std::size_t> max_arity() const noexcept { return max_arity_; }
  const CoValue& default_value() const noexcept { return default_; }
  bool claims_epsilon_standard() const noexcept { return epsilon_standard_; }

  bool is_tabulated() const noexcept { return table_ != nullptr; }
  /// Table entries in StringSpace order (tabulated functions only).
  const std::vector<CoValue>& table_entries() const;

  const DiagonalInverse& diagonal_inverse() const noexcept { return diagonal_inverse_; }

  VarFn with_diagonal_inverse(DiagonalInverse inv) const;
  VarFn with_default(CoValue v) const;
  VarFn with_name(std::string name, nlohmann::json params = nlohmann::json::object()) const;
  VarFn with_epsilon_standard_claim(bool claim) const;

 private:
  struct Table {
    StringSpace space;
    std::vector<CoValue> entries;
  };

  VarFn() = default;
  void check_input(std::span<const Atom> x) const;

  std::string name_;
  nlohmann::json params_ = nlohmann::json::object();
  DomainDesc domain_ = DomainDesc::reals();
  DomainDesc codomain_ = DomainDesc::reals();
  std::optional<std::size_t> max_arity_;
  CoValue default_;
  bool epsilon_standard_ = false;
  std::shared_ptr<const Evaluator> evaluate_;
  std::shared_ptr<const Table> table_;
  DiagonalInverse diagonal_inverse_;
};

/// F(x); the default value for the empty string.
CoValue eval(const VarFn& f, std::span<const Atom> x);

/// Tabulates F over a finite set of atoms for all arities up to max_arity.
/// The codomain is the domain when every value lies in it (or is epsilon),
/// otherwise the sorted list of observed values.
VarFn tabulate(const VarFn& f, std::vector<Atom> elements, std::size_t max_arity);

struct DiagonalSections {
  std::size_t arity = 0;
  std::function<CoValue(const Atom&)> delta;
  std::function<CoValue(const Atom&, const Atom&)> delta_r;
  std::function<CoValue(const Atom&, const Atom&)> delta_l;
};

/// delta(x) = F(x^n), delta_r(x, y) = F(x^(n-1) y), delta_l(x, y) = F(x y^(n-1)).
/// For n = 1 the binary sections degenerate to F_1 (of y and of x respectively).
DiagonalSections sections(const VarFn& f, std::size_t n);

}  // namespace barylab
