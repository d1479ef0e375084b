#include <cmath>

#include "doctest.h"
#include "barylab/builtins.hpp"
#include "barylab/properties.hpp"
#include "support.hpp"

using namespace barylab;
using oracle::real;

namespace {

// Delta_n^z summed term by term, independent of the library.
double normalizer(double z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 1; i <= n; ++i) s += std::pow(z, double(n - i)) * std::pow(1 - z, double(i - 1));
  return s;
}

double weighted(double z, const std::vector<double>& x) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 1; i <= n; ++i) s += std::pow(z, double(n - i)) * std::pow(1 - z, double(i - 1)) * x[i - 1];
  return s / normalizer(z, n);
}

Str reals(std::initializer_list<double> xs) {
  Str s;
  for (double x : xs) s.emplace_back(x);
  return s;
}

}  // namespace

TEST_CASE("quasi-arithmetic means") {
  CHECK(approx_equal(quasi_arithmetic(generators::identity())({1.0, 2.0, 3.0}), CoValue(2.0)));
  CHECK(approx_equal(quasi_arithmetic(generators::log())({2.0, 8.0}), CoValue(4.0)));
  CHECK(approx_equal(quasi_arithmetic(generators::reciprocal())({1.0, 1.0}), CoValue(1.0)));
  CHECK(quasi_arithmetic(generators::identity())(Str{}).is_epsilon());
}

TEST_CASE("quasi-arithmetic means are idempotent on sample points") {
  for (const char* g : {"id", "ln", "inv", "cube"}) {
    const VarFn f = quasi_arithmetic(generators::by_name(g));
    for (std::size_t n = 1; n <= 6; ++n) {
      for (double x : {0.25, 1.0, 3.5, 10.0}) CHECK(approx_equal(f(Str(n, Atom(x))), CoValue(x)));
    }
  }
}

TEST_CASE("quasi-arithmetic pre-means") {
  CHECK(approx_equal(pre_mean(generators::with_scaled_outer(generators::identity()))({1.0, 2.0, 3.0}), CoValue(6.0)));
  CHECK(approx_equal(pre_mean(generators::with_exp_outer(generators::log()))({2.0, 3.0}), CoValue(6.0)));
  CHECK(approx_equal(pre_mean(generators::identity())({5.0, 5.0}), CoValue(5.0)));
}

TEST_CASE("pre-mean with inverse outer maps equals the quasi-arithmetic mean") {
  for (const char* g : {"id", "ln", "inv", "cube"}) {
    const GeneratorSpec spec = generators::by_name(g);
    const VarFn a = pre_mean(spec), b = quasi_arithmetic(spec);
    for (const Str& s : {reals({1.0}), reals({0.5, 2.0}), reals({1.0, 2.0, 7.0}), reals({3.0, 0.25, 4.0, 9.0})}) {
      CHECK(approx_equal(a(s), b(s)));
    }
  }
}

TEST_CASE("generator validation") {
  CHECK_NOTHROW(validate_generator(generators::log()));
  CHECK_NOTHROW(validate_generator(generators::with_exp_outer(generators::log())));
  GeneratorSpec square{"square", Interval::real_line(), [](double x) { return x * x; },
                       [](double y) { return std::sqrt(y); }, nullptr, nullptr};
  try {
    validate_generator(square);
    FAIL("expected GeneratorNotInvertible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::generator_not_invertible);
  }
  GeneratorSpec bad_inverse = generators::identity();
  bad_inverse.f_inv = [](double y) { return 2 * y; };
  CHECK_THROWS_AS(validate_generator(bad_inverse), Error);
  GeneratorSpec bad_outer = generators::identity();
  bad_outer.outer = [](std::size_t, double t) { return -t; };
  bad_outer.outer_inv = [](std::size_t, double y) { return -y; };
  CHECK_THROWS_AS(validate_generator(bad_outer), Error);
}

TEST_CASE("M^z values") {
  CHECK(approx_equal(m_z(0.5)({1.0, 2.0, 3.0}), CoValue(2.0)));
  CHECK(approx_equal(m_z(1.0)({7.0, 9.0, 4.0}), CoValue(7.0)));
  CHECK(approx_equal(m_z(2.0)({3.0, 1.0}), CoValue(5.0)));
  CHECK(m_z(2.0)(Str{}).is_epsilon());
}

TEST_CASE("M^z matches the weighted-sum oracle") {
  const std::vector<std::vector<double>> inputs{{1.0}, {2.0, -1.0}, {0.5, 3.0, -2.0}, {1.0, 2.0, 3.0, 4.0, 5.0}};
  for (double z : {-1.0, 0.3, 0.5, 1.0, 2.0, 3.7}) {
    const VarFn f = m_z(z);
    for (const auto& x : inputs) {
      Str s(x.begin(), x.end());
      CHECK(approx_equal(real(f(s)), weighted(z, x)));
    }
  }
}

TEST_CASE("M^z normalizer never vanishes and has its closed form") {
  for (double z : {-3.0, -1.0, 0.0, 0.3, 0.5, 1.0, 2.0, 5.0}) {
    CHECK(mz_normalizer(z, 1) == 1.0);
    for (std::size_t n = 1; n <= 10; ++n) {
      const double d = mz_normalizer(z, n);
      CHECK(d != 0.0);
      CHECK(approx_equal(d, normalizer(z, n)));
      const double closed = z == 0.5 ? n * std::pow(2.0, 1.0 - double(n))
                                     : (std::pow(z, double(n)) - std::pow(1 - z, double(n))) / (2 * z - 1);
      CHECK(approx_equal(d, closed));
    }
  }
}

TEST_CASE("M^z section coefficients") {
  const SectionCoeffs half = mz_section_coeffs(0.5, 2);
  CHECK(approx_equal(half.a, 2.0 / 3));
  CHECK(approx_equal(half.b, 1.0 / 3));
  for (double z : {-1.0, 0.3, 2.0, 7.0}) {
    const SectionCoeffs c = mz_section_coeffs(z, 1);
    CHECK(approx_equal(c.a, z));
    CHECK(approx_equal(c.b, 1 - z));
  }
  CHECK(approx_equal(mz_section_coeffs(2.0, 2).a, 2.0 / 3));
  for (double z : {-1.0, 0.3, 0.5, 2.0}) {
    for (std::size_t k = 1; k <= 6; ++k) {
      const SectionCoeffs c = mz_section_coeffs(z, k);
      CHECK(c.a + c.b == 1.0);
      // right section of M^z at arity k + 1
      const DiagonalSections s = sections(m_z(z), k + 1);
      for (double x : {-1.0, 2.0}) {
        for (double y : {0.5, 3.0}) CHECK(approx_equal(real(s.delta_r(Atom(x), Atom(y))), c.a * x + c.b * y));
      }
    }
  }
}

TEST_CASE("M^z section coefficients solve the cross-equation system") {
  for (double z : {-1.0, 0.3, 0.5, 2.0}) {
    // a_1 = 1, b_1 = 1, then a_{k+1}, b_{k+1}
    std::vector<double> a{0.0, 1.0}, b{0.0, 1.0};
    for (std::size_t k = 1; k <= 6; ++k) {
      const SectionCoeffs c = mz_section_coeffs(z, k);
      a.push_back(c.a);
      b.push_back(c.b);
    }
    for (std::size_t k = 2; k <= 5; ++k) {
      double prod = 1.0;
      for (std::size_t j = 1; j <= k + 1; ++j) prod *= a[j];
      for (std::size_t i = 2; i <= k + 1; ++i) {
        CHECK(std::abs(a[k + 1] * b[i] - a[i] * b[i - 1] * (1 - prod)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("named builtins") {
  const VarFn am = named_builtin("abs_mean");
  CHECK(am({1.0}) == CoValue(1.0));
  CHECK(am({-1.0}) == CoValue(1.0));
  CHECK(named_builtin("clamped_sum")({-1.0, -2.0}) == CoValue(0.0));
  CHECK(named_builtin("clamped_sum")({-1.0, 1.0}) == CoValue(0.0));
  const VarFn bc = named_builtin("barycenter", {{"d", 2}});
  CHECK(approx_equal(bc({Point{0.0, 0.0}, Point{2.0, 0.0}}), CoValue(Atom(Point{1.0, 0.0}))));
  CHECK(approx_equal(named_builtin("m_z", {{"z", 2.0}})({3.0, 1.0}), CoValue(5.0)));
  CHECK(named_builtin("F_a", {{"a", 1}, {"domain", {0, 1}}})({0.0, 0.0}).is_epsilon());
  CHECK(approx_equal(named_builtin("quasi_arithmetic", {{"f", "ln"}})({2.0, 8.0}), CoValue(4.0)));
  CHECK(approx_equal(named_builtin("pre_mean", {{"f", "id"}, {"outer", "scale"}})({1.0, 2.0, 3.0}), CoValue(6.0)));
  CHECK(named_builtin("max_op", {{"domain", {0, 1}}, {"max_arity", 3}}).is_tabulated());
  CHECK(named_builtin("length_fn")({4.0, 4.0}) == CoValue(2.0));
  CHECK(named_builtin("first_proj")({4.0, 5.0}) == CoValue(4.0));
  CHECK(named_builtin("last_proj")({4.0, 5.0}) == CoValue(5.0));
  CHECK(approx_equal(named_builtin("harm_mean")({1.0, 3.0}), CoValue(1.5)));
  try {
    named_builtin("no_such_function");
    FAIL("expected UnknownName");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unknown_name);
  }
  CHECK_THROWS_AS(named_builtin("m_z"), Error);
  for (const auto& n : builtin_names()) CHECK_FALSE(n.empty());
}

TEST_CASE("barycenter accumulates masses exactly on dyadic inputs") {
  const VarFn bc = barycenter(2);
  const Str s{Point{1.0, 2.0}, Point{3.0, -1.0}, Point{0.5, 0.5}};
  const CoValue whole = bc(s);
  const Str inner{Point{3.0, -1.0}, Point{0.5, 0.5}};
  const Atom m = bc(inner).value();
  CHECK(bc(Str{s[0], m, m}) == whole);
}
