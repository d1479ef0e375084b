#pragma once

// Building B-associative operations: from prescribed sections, arity by
// arity, with constant tails, and by exhaustive enumeration on tiny domains.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "barylab/core.hpp"
#include "barylab/properties.hpp"

namespace barylab {

/// phi_1 on X, binary phi_k for k >= 2 and the side u_k each phi_k prescribes.
struct SectionSpec {
  DomainDesc domain = DomainDesc::reals();
  std::function<Atom(const Atom&)> phi1;
  std::function<Atom(std::size_t k, const Atom&, const Atom&)> phi;
  std::function<SectionSide(std::size_t k)> side = [](std::size_t) { return SectionSide::r; };
  std::string name = "sections";
};

enum class ConstructionStatus {
  ok,
  phi1_not_retraction,
  condition_a_violated,
  condition_b_awri,
  condition_b_cross,
};

std::string_view to_string(ConstructionStatus s);

struct Construction {
  ConstructionStatus status = ConstructionStatus::ok;
  /// The recursively defined G (present whenever it could be built).
  std::optional<VarFn> function;
  /// Arity at which a condition failed.
  std::size_t arity = 0;
  std::optional<Witness> witness;
  std::string detail;

  bool ok() const noexcept { return status == ConstructionStatus::ok; }
};

/// Builds G with G_1 = phi_1 and G_{k+1}(x y z) = phi_{k+1}(G_k(x y), z) when
/// u_{k+1} = r (phi_{k+1}(x, G_k(y z)) when u_{k+1} = l), then verifies
/// phi_1 o phi_1 = phi_1, the compatibility of each phi_{k+1} with the diagonal
/// of phi_k, arity-wise range-idempotence of G and the cross equation, arity by
/// arity up to max_arity.
Construction from_sections(const SectionSpec& spec, std::size_t max_arity, const SearchConfig& cfg = {});

/// phi_1 = F_1 and phi_k = the u_k-section of F_k.
SectionSpec section_spec_of(const VarFn& f, std::function<SectionSide(std::size_t)> side = {});

/// phi_1 = id, phi_{k+1}(x, y) = a_{k+1} x + b_{k+1} y with the M^z coefficients, u = r.
SectionSpec mz_section_spec(double z);

struct ExtensionVerdict {
  /// pass: accepted; fail: rejected with witness; unsupported: F is not B-associative up to k.
  Status status = Status::unsupported;
  std::optional<Witness> witness;
  /// Which equation failed: "diagonal", "right_absorption" or "left_absorption".
  std::string failed_equation;
  /// b_associative on the extended function up to arity k + 1.
  std::optional<PropertyReport> cross_check;
  std::string note;

  bool accepted() const noexcept { return status == Status::pass; }
};

/// Accepts candidate F_{k+1} iff delta o F_{k+1} = F_{k+1} and
/// F_{k+1}(x y z) = F_{k+1}(x F_k(y z)^k) = F_{k+1}(F_k(x y)^k z) on the space.
ExtensionVerdict extend(const VarFn& f, std::size_t k, const Evaluator& candidate, const SearchConfig& cfg = {});

/// F restricted to arities <= k followed by the candidate at k + 1.
VarFn extended_function(const VarFn& f, std::size_t k, const Evaluator& candidate);

struct ConstantTail {
  VarFn base;
  std::size_t cutoff = 1;
  /// c_k for every arity k > cutoff.
  std::function<Atom(std::size_t)> constants;
};

struct ConstantTailResult {
  VarFn function;
  PropertyReport precondition;
  std::optional<PropertyReport> cross_check;

  bool ok() const noexcept { return precondition.passed() && cross_check && cross_check->passed(); }
};

/// G_k = F_k for k <= cutoff and G_k = c_k beyond. The base is checked first;
/// when it is not B-associative the cross check is skipped.
ConstantTailResult constant_tail(const ConstantTail& t, const SearchConfig& cfg = {});

struct EnumerationFilter {
  bool associative = false;
  bool idempotent = false;
};

struct Census {
  std::size_t domain_size = 0;
  std::size_t max_arity = 0;
  /// All epsilon-standard tables up to max_arity.
  std::uint64_t total = 0;
  std::uint64_t b_associative = 0;
  std::uint64_t associative = 0;
  std::uint64_t idempotent = 0;
  std::vector<std::string> examples;
};

struct Enumeration {
  /// Tabulated B-associative epsilon-standard operations passing the filter,
  /// in lexicographic order of their tables.
  std::vector<VarFn> operations;
  Census census;
};

/// Extends arity by arity through the solutions of the extension equations.
/// |X| <= 3 and max_arity <= 3; throws Error(budget_exceeded) past cfg.budget
/// search nodes.
Enumeration enumerate_b_associative(const DomainDesc& domain, std::size_t max_arity, EnumerationFilter filter = {},
                                    const SearchConfig& cfg = {});

enum class OpenProblem { a, b, divisibility };

struct ProbeReport {
  OpenProblem problem = OpenProblem::a;
  std::size_t domain_size = 0;
  std::size_t max_arity = 0;
  std::uint64_t examined = 0;
  std::optional<VarFn> counterexample;
  std::string detail;
  /// A proved implication failed (divisibility only).
  bool critical = false;
  std::string outcome;
};

std::string_view to_string(OpenProblem p);

/// (a) every enumerated F has an idempotent B-associative G with F_n = delta_{F_n} o G_n;
/// (b) F_{k+1} idempotent forces F_k idempotent; divisibility: F_{kn} idempotent forces F_k idempotent.
/// Only bounded searches; "no counterexample" is never a proof.
ProbeReport probe_open_problems(OpenProblem problem, const DomainDesc& domain, std::size_t max_arity,
                                const SearchConfig& cfg = {});

nlohmann::json census_to_json(const Census& c);
nlohmann::json probe_to_json(const ProbeReport& p);
nlohmann::json construction_to_json(const Construction& c);

}  // namespace barylab
