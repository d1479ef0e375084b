#pragma once

// Quasi-inverses of finite maps and the factorization F_n = f_n o H_n of
// B-preassociative, arity-wise quasi-range-idempotent functions.

#include <optional>
#include <string>
#include <vector>

#include "barylab/builtins.hpp"
#include "barylab/core.hpp"
#include "barylab/properties.hpp"

namespace barylab {

/// A unary map between finite ordered sets of codomain values (epsilon allowed).
/// The element order is the order used for canonical choices.
struct FiniteMap {
  std::vector<CoValue> domain;
  std::vector<CoValue> codomain;
  /// image[i] indexes codomain for domain[i].
  std::vector<std::size_t> image;

  static FiniteMap from_function(std::vector<CoValue> domain, std::vector<CoValue> codomain,
                                 const std::function<CoValue(const CoValue&)>& fn);

  std::optional<std::size_t> domain_index(const CoValue& x) const;
  std::optional<std::size_t> codomain_index(const CoValue& y) const;
  /// Throws DomainMismatch outside the domain.
  const CoValue& operator()(const CoValue& x) const;
  /// Range in codomain order.
  std::vector<CoValue> range() const;
  bool injective() const;
};

struct QuasiInverse {
  FiniteMap f;
  FiniteMap g;
  /// The identities that were verified, in words.
  std::vector<std::string> certificate;
};

/// Canonical quasi-inverse: least preimage on ran(f); off the range, the value
/// at the least element of ran(f). Throws EmptyDomain.
QuasiInverse quasi_inverse(const FiniteMap& f);

/// f o g = id on ran(f) and ran(g|ran(f)) = ran(g). g may be partial but must
/// be defined on ran(f).
bool is_quasi_inverse(const FiniteMap& f, const FiniteMap& g);

/// Every g: codomain(f) -> domain(f) in Q(f). Both sides must have at most 4 elements.
std::vector<FiniteMap> all_quasi_inverses(const FiniteMap& f);

/// Ordered set of values taken by a finite-domain function up to arity
/// max_len (epsilon first when it occurs), used as the codomain of its diagonals.
std::vector<CoValue> observed_codomain(const VarFn& f, std::size_t max_len);

/// delta_n as a finite map from the domain of f to `codomain`.
FiniteMap diagonal_map(const VarFn& f, std::size_t n, const std::vector<CoValue>& codomain);

/// Raised by factorization entry points; carries the failed property report.
class FactorizationError : public Error {
 public:
  FactorizationError(ErrorCode code, const std::string& what, PropertyReport report)
      : Error(code, what), report_(std::move(report)) {}
  const PropertyReport& report() const noexcept { return report_; }

 private:
  PropertyReport report_;
};

struct RangeFactor {
  std::size_t arity = 0;
  /// H_n = g o F_n.
  std::function<CoValue(std::span<const Atom>)> h;
  /// H_n over X^n in lexicographic order (finite domains only).
  std::vector<CoValue> table;
  bool reconstructs = false;             ///< delta_{F_n} o H_n = F_n
  bool range_idempotent = false;         ///< delta_{H_n} o H_n = H_n
  bool diagonal_injective_on_range = false;  ///< delta_{F_n} one-to-one on ran(H_n)
};

/// H_n = g o F_n for a quasi-inverse g of delta_{F_n} on a finite domain.
/// Throws FactorizationError(NotQuasiRangeIdempotent) with a value of ran(F_n)
/// outside ran(delta_{F_n}).
RangeFactor range_idempotent_factor(const VarFn& f, std::size_t n, const QuasiInverse& g);
/// Same with the canonical quasi-inverse (finite domain) or the closed-form
/// diagonal inverse (numeric domain, checked on the sample space).
RangeFactor range_idempotent_factor(const VarFn& f, std::size_t n, const SearchConfig& cfg = {});

struct OuterMap {
  std::size_t arity = 0;
  /// f_n = delta_{F_n} restricted to ran(H_n), as a table when the domain is finite.
  std::optional<FiniteMap> table;
  std::function<CoValue(const Atom&)> apply;
  std::string description;
};

struct FactorizationResult {
  /// H: epsilon-standard, H_n = g_n o F_n.
  VarFn inner;
  /// outer[n - 1] is f_n.
  std::vector<OuterMap> outer;
  /// H B-associative, each f_n one-to-one, F_n = f_n o H_n, f_n^-1 in Q(delta_{F_n}).
  std::vector<PropertyReport> checks;
  std::string convention;

  bool verified() const;
};

/// Throws FactorizationError(NotBPreassociative | NotQuasiRangeIdempotent),
/// or Error(Unsupported) for numeric functions without a diagonal inverse.
FactorizationResult factorize(const VarFn& f, const SearchConfig& cfg = {});

struct IdempotizableFactor {
  std::size_t arity = 0;
  /// The unique idempotent H_n with F_n = delta_{F_n} o H_n.
  std::function<CoValue(std::span<const Atom>)> h;
  /// delta_{F_n}, a bijection onto ran(F_n).
  std::function<CoValue(const Atom&)> f;
  std::vector<CoValue> table;  ///< finite domains only
};

/// Throws DiagonalNotInjective, or FactorizationError(NotQuasiRangeIdempotent).
IdempotizableFactor idempotizable_decompose(const VarFn& f, std::size_t n, const SearchConfig& cfg = {});

struct AffineVerdict {
  bool equivalent = false;
  double r = 0.0;
  double s = 0.0;
  /// Largest deviation of g o f^-1 and of each g_n^-1 o f_n from r t + s on the grid.
  double fit_error = 0.0;
  /// For distinct pairs: a two-point string where the two means disagree
  /// (lhs = mean under g1, rhs = mean under g2).
  std::optional<Witness> witness;
  std::string detail;
};

/// Whether g2 = r g1 + s with matching outer maps, fitted at the two quartile
/// points of the sample window. Throws DegenerateFit when the fit points
/// coincide under g1.
AffineVerdict affine_identifiability(const GeneratorSpec& g1, const GeneratorSpec& g2, const SearchConfig& cfg = {},
                                     std::size_t max_arity = 6);

}  // namespace barylab
