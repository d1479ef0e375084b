#pragma once

// The verification engine. Finite domains are searched exhaustively in
// (length, lexicographic) order, so the first violation found is the minimal
// witness. Numeric domains get a grid sweep followed by seeded random instances.

#include <functional>
#include <string>
#include <vector>

#include "barylab/core.hpp"
#include "barylab/report.hpp"
#include "barylab/sampling.hpp"

namespace barylab {

PropertyReport check(const VarFn& f, Property p, const SearchConfig& cfg = {});
inline PropertyReport check(const VarFn& f, PropertyId id, const SearchConfig& cfg = {}) {
  return check(f, Property{id}, cfg);
}

/// F(x) = epsilon iff x = epsilon, on all strings up to max_len.
PropertyReport is_epsilon_standard(const VarFn& f, std::size_t max_len, const SearchConfig& cfg = {});

/// Re-evaluates a failing report's witness and confirms the violation.
bool witness_reproduces(const VarFn& f, const PropertyReport& report, Tolerance tol = {});

/// Strings with exactly `len` atoms that a check visits: every string over a
/// finite domain in index order, otherwise the grid strings (when len <= cfg.grid_len)
/// followed by `random_count` seeded random strings.
std::vector<Str> probe_strings(const DomainDesc& domain, std::size_t len, const SearchConfig& cfg,
                               std::size_t random_count);

using StringCheck = std::function<std::optional<Witness>(const Str&)>;

/// Generic identity check: runs `check` on probe_strings of each length in
/// [min_len, max_len] and fails at the first witness.
PropertyReport check_identity(const VarFn& f, std::string name, const SearchConfig& cfg, std::size_t min_len,
                              std::size_t max_len, const StringCheck& check);

/// Effective longest string for checks on f: cfg.max_len capped by f's max arity.
std::size_t effective_max_len(const VarFn& f, const SearchConfig& cfg);

/// x F(y)^n z with F(y) = v; nullopt when v is neither epsilon nor in the domain.
/// Values in a finite domain are replaced by the domain's own atom.
std::optional<Str> substitute(const DomainDesc& domain, std::span<const Atom> x, const CoValue& v, std::size_t n,
                              std::span<const Atom> z);

// ---------------------------------------------------------------------------
// Agreements that must hold between independently checked properties

struct EquivalenceOutcome {
  std::string relation;
  std::vector<std::pair<std::string, Status>> verdicts;
  bool agree = true;
  std::string detail;
};

/// Evaluates each side of the equivalences independently and compares verdicts:
/// the four forms of B-associativity, the simplified forms, B-associativity as
/// B-preassociativity plus arity-wise range-idempotence, and the implications
/// that follow from them. A disagreement is an implementation bug.
std::vector<EquivalenceOutcome> check_equivalence_suite(const VarFn& f, const SearchConfig& cfg = {});

bool all_agree(const std::vector<EquivalenceOutcome>& outcomes);

// ---------------------------------------------------------------------------
// Composition closure

enum class CompositionSide { left, right };

using AtomMap = std::function<Atom(const Atom&)>;

struct CompositionMaps {
  CompositionSide side = CompositionSide::right;
  /// Right: exactly one inner map applied to every argument. Left: one shared
  /// outer map, or one per arity starting at arity 1.
  std::vector<AtomMap> maps;
  /// Left only: the caller asserts each g_n is one-to-one on ran(F_n).
  bool injective_on_range = false;
  std::string label;
  /// Codomain of the composed function (defaults to f's codomain).
  std::optional<DomainDesc> codomain;
};

/// H_n = F_n o (g, ..., g) or H_n = g_n o F_n. Throws ArityMismatch when a
/// per-arity list is shorter than `arity_needed`.
VarFn compose(const VarFn& f, const CompositionMaps& maps, std::size_t arity_needed = 0);

/// Builds the composition and checks it for B-preassociativity. A failure while
/// the closure hypotheses hold is flagged critical.
PropertyReport check_composition_closure(const VarFn& f, const CompositionMaps& maps, const SearchConfig& cfg = {});

// ---------------------------------------------------------------------------
// Propagation and determination

enum class PropagationKind { symmetry, constant, inner_symmetry };

/// Hypothesis at arity k implies the conclusion at the next arity:
/// symmetry (F_k symmetric => F_{k+1} symmetric, k >= 2), constant (F_k constant
/// => F_{k+1} constant), inner_symmetry (y -> F_{k+2}(x y z) symmetric on X^k =>
/// y -> F_{k+3}(x y z) symmetric on X^{k+1}). `basis` is the property F must
/// satisfy for the implication to apply (b_associative or b_preassociative).
PropertyReport check_propagation(const VarFn& f, PropagationKind kind, std::size_t k, const SearchConfig& cfg = {},
                                 PropertyId basis = PropertyId::b_associative);

enum class SectionSide { r, l };

/// Two functions with the same chosen sections at every arity coincide, provided
/// both are B-associative and epsilon-standard, or both are B-preassociative and
/// arity-wise quasi-range-idempotent. Unmet preconditions are reported as
/// unsupported; a disagreement under them is critical.
PropertyReport check_determination(const VarFn& f, const VarFn& g, const std::vector<SectionSide>& sides,
                                   const SearchConfig& cfg = {});

}  // namespace barylab
