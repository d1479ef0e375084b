#pragma once

// Concrete function families: quasi-arithmetic means and pre-means, the
// nonsymmetric linear means M^z, and the named examples (sum, length, F_a, ...).

#include <functional>
#include <string>
#include <utility>

#include "barylab/core.hpp"

namespace barylab {

using RealMap = std::function<double(double)>;
using ArityRealMap = std::function<double(std::size_t, double)>;

/// A generator f on an interval with explicit inverse, plus optional per-arity
/// outer maps f_n (with inverses) for pre-means. Without outer maps, f_n = f^-1.
struct GeneratorSpec {
  std::string name;
  Interval interval;
  RealMap f;
  RealMap f_inv;
  ArityRealMap outer;
  ArityRealMap outer_inv;

  double apply_outer(std::size_t n, double t) const { return outer ? outer(n, t) : f_inv(t); }
  double apply_outer_inv(std::size_t n, double y) const { return outer_inv ? outer_inv(n, y) : f(y); }
};

namespace generators {

GeneratorSpec identity();
/// f = ln on (0, inf).
GeneratorSpec log();
/// f = 1/x on (0, inf) (strictly decreasing).
GeneratorSpec reciprocal();
/// f = x^3 on R.
GeneratorSpec cube();

/// Outer maps f_n(t) = n t.
GeneratorSpec with_scaled_outer(GeneratorSpec g);
/// Outer maps f_n(t) = exp(n t).
GeneratorSpec with_exp_outer(GeneratorSpec g);
/// g = r f + s with outer maps g_n(t) = f_n((t - s) / r); the pre-mean is unchanged.
GeneratorSpec affine_reparam(const GeneratorSpec& g, double r, double s);

/// Looks up "id", "ln", "inv", "cube".
GeneratorSpec by_name(const std::string& name);

}  // namespace generators

/// Throws GeneratorNotInvertible unless f is strictly monotone with a matching
/// inverse on sample points, and every outer map is strictly increasing.
void validate_generator(const GeneratorSpec& g, std::size_t max_arity = 6);

/// F_n(x) = f^-1((1/n) sum f(x_i)).
VarFn quasi_arithmetic(const GeneratorSpec& g);
/// F_n(x) = f_n((1/n) sum f(x_i)).
VarFn pre_mean(const GeneratorSpec& g);

/// Delta_n^z = sum_{i=1}^n z^(n-i) (1-z)^(i-1).
double mz_normalizer(double z, std::size_t n);
/// M^z_n(x) = sum z^(n-i) (1-z)^(i-1) x_i / Delta_n^z.
VarFn m_z(double z);

struct SectionCoeffs {
  double a;  ///< a_{k+1}
  double b;  ///< b_{k+1}
};

/// Coefficients of the right section of M^z at arity k+1:
/// delta^r(x, y) = a x + b y with a = z Delta_k / Delta_{k+1}, b = 1 - a.
SectionCoeffs mz_section_coeffs(double z, std::size_t k);

VarFn arith_mean();
VarFn geom_mean();
VarFn harm_mean();
VarFn sum_fn();
VarFn product_fn();
VarFn length_fn();
VarFn first_proj();
VarFn last_proj();
VarFn max_op();
/// a if the string contains a, epsilon otherwise; default epsilon.
VarFn f_a(const Atom& a, DomainDesc domain = DomainDesc::reals());
/// |mean(x)|.
VarFn abs_mean();
/// max(sum(x), 0).
VarFn clamped_sum();
/// Barycenter of unit masses in R^d, accumulated exactly.
VarFn barycenter(std::size_t dimension);

/// Constant function c at every positive arity, default epsilon.
VarFn constant_fn(CoValue c, DomainDesc domain = DomainDesc::reals());

/// Registry lookup by name with a JSON parameter object, e.g.
/// {"z": 2.0} for "m_z", {"a": 1} for "F_a", {"d": 2} for "barycenter",
/// {"f": "ln"} for "quasi_arithmetic", {"f": "id", "outer": "scale"} for "pre_mean".
/// A "domain" array tabulates the function over those atoms up to "max_arity" (default 4).
VarFn named_builtin(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

std::vector<std::string> builtin_names();

}  // namespace barylab
