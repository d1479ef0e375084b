#include <cmath>
#include <random>

#include "doctest.h"
#include "barylab/builtins.hpp"
#include "barylab/factorization.hpp"
#include "support.hpp"

using namespace barylab;
using oracle::real;

namespace {

std::vector<CoValue> vals(std::initializer_list<double> xs) {
  std::vector<CoValue> v;
  for (double x : xs) v.emplace_back(x);
  return v;
}

FiniteMap map_of(std::vector<CoValue> dom, std::vector<CoValue> cod, std::vector<std::size_t> image) {
  return FiniteMap{std::move(dom), std::move(cod), std::move(image)};
}

SearchConfig cfg_len(std::size_t n) {
  SearchConfig c;
  c.max_len = n;
  c.samples = 1000;
  return c;
}

// f o g = id on ran(f), and g attains its whole range on ran(f): checked from scratch
bool quasi_inverse_oracle(const FiniteMap& f, const FiniteMap& g) {
  std::vector<CoValue> ran_f, ran_g_on, ran_g;
  for (std::size_t i = 0; i < f.domain.size(); ++i) ran_f.push_back(f.codomain[f.image[i]]);
  for (const CoValue& y : ran_f) {
    const CoValue& x = g(y);
    if (f(x) != y) return false;
    ran_g_on.push_back(x);
  }
  for (std::size_t i = 0; i < g.domain.size(); ++i) ran_g.push_back(g.codomain[g.image[i]]);
  for (const CoValue& x : ran_g) {
    if (std::find(ran_g_on.begin(), ran_g_on.end(), x) == ran_g_on.end()) return false;
  }
  return true;
}

FiniteMap random_map(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::vector<CoValue> dom, cod;
  for (std::size_t i = 0; i < n; ++i) dom.emplace_back(double(i));
  for (std::size_t i = 0; i < m; ++i) cod.emplace_back(double(10 + i));
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::vector<std::size_t> img(n);
  for (auto& v : img) v = pick(rng);
  return map_of(dom, cod, img);
}

}  // namespace

TEST_CASE("canonical quasi-inverses") {
  const FiniteMap id = map_of(vals({0, 1}), vals({0, 1}), {0, 1});
  const QuasiInverse q = quasi_inverse(id);
  CHECK(q.g.image == std::vector<std::size_t>{0, 1});
  CHECK_FALSE(q.certificate.empty());

  const FiniteMap zero = map_of(vals({0, 1}), vals({0, 1}), {0, 0});
  const QuasiInverse z = quasi_inverse(zero);
  CHECK(z.g(CoValue(0.0)) == CoValue(0.0));
  CHECK(z.g(CoValue(1.0)) == CoValue(0.0));
  // every g: {0,1} -> {0,1} with f o g = id on {0}
  std::size_t members = 0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const FiniteMap g = map_of(vals({0, 1}), vals({0, 1}), {a, b});
      const bool in = quasi_inverse_oracle(zero, g);
      CHECK(is_quasi_inverse(zero, g) == in);
      members += in;
    }
  }
  CHECK(members == all_quasi_inverses(zero).size());

  const FiniteMap one = map_of(vals({0, 1, 2}), vals({0, 1, 2}), {1, 1, 1});
  const QuasiInverse o = quasi_inverse(one);
  for (double y : {0.0, 1.0, 2.0}) CHECK(o.g(CoValue(y)) == CoValue(0.0));
  CHECK(is_quasi_inverse(one, o.g));

  CHECK_THROWS_AS(quasi_inverse(map_of({}, vals({0}), {})), Error);
}

TEST_CASE("quasi-inverse symmetry and the f o g o h = h identity on random maps") {
  std::mt19937_64 rng(0x5EED);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 4, m = 1 + rng() % 4;
    const FiniteMap f = random_map(rng, n, m);
    const QuasiInverse q = quasi_inverse(f);
    CHECK(quasi_inverse_oracle(f, q.g));
    // the relation is symmetric: f is a quasi-inverse of g restricted to the range it attains
    const FiniteMap g = q.g;
    std::vector<CoValue> ran_g;
    for (std::size_t i = 0; i < g.domain.size(); ++i) ran_g.push_back(g.codomain[g.image[i]]);
    for (const CoValue& x : ran_g) CHECK(g(f(x)) == x);
    CHECK(f.injective() == (f.range().size() == f.domain.size()));
    for (const FiniteMap& alt : all_quasi_inverses(f)) {
      CHECK(quasi_inverse_oracle(f, alt));
      // h with ran(h) inside ran(f)
      const auto ran_f = f.range();
      for (std::size_t k = 0; k < 3; ++k) {
        const CoValue hv = ran_f[rng() % ran_f.size()];
        CHECK(f(alt(hv)) == hv);
      }
    }
  }
}

TEST_CASE("range-idempotent factors") {
  SearchConfig c = cfg_len(3);
  const RangeFactor s = range_idempotent_factor(sum_fn(), 2, c);
  for (double x : {-1.0, 0.5, 3.0}) {
    for (double y : {2.0, -4.0}) CHECK(approx_equal(s.h(Str{x, y}), CoValue((x + y) / 2)));
  }
  CHECK(s.reconstructs);
  CHECK(s.range_idempotent);
  CHECK(s.diagonal_injective_on_range);

  const VarFn fp = tabulate(first_proj(), {Atom(0.0), Atom(1.0)}, 2);
  const RangeFactor p = range_idempotent_factor(fp, 2, c);
  for (const Str& x : oracle::strings_of(fp.domain().elements(), 2)) CHECK(p.h(x) == fp(x));

  const VarFn x = VarFn::tabulated(oracle::bits(), oracle::bits(), 2,
                                   {CoValue::epsilon(), CoValue(0.0), CoValue(1.0), CoValue(0.0), CoValue(1.0),
                                    CoValue(1.0), CoValue(0.0)});
  try {
    range_idempotent_factor(x, 2, c);
    FAIL("expected NotQuasiRangeIdempotent");
  } catch (const FactorizationError& e) {
    CHECK(e.code() == ErrorCode::not_quasi_range_idempotent);
    REQUIRE(e.report().witness);
    CHECK(e.report().witness->lhs == CoValue(1.0));
  }
}

TEST_CASE("factorize numeric functions") {
  SearchConfig c = cfg_len(4);
  const FactorizationResult s = factorize(sum_fn(), c);
  CHECK(s.verified());
  for (const Str& x : {Str{1.0}, Str{1.0, 2.0}, Str{-3.0, 0.5, 8.0}, Str{2.0, 2.0, 2.0, 5.0}}) {
    double mean = 0;
    for (const Atom& a : x) mean += std::get<double>(a);
    mean /= double(x.size());
    CHECK(approx_equal(s.inner(x), CoValue(mean)));
    const std::size_t n = x.size();
    CHECK(approx_equal(s.outer[n - 1].apply(Atom(mean)), CoValue(double(n) * mean)));
    CHECK(approx_equal(s.outer[n - 1].apply(s.inner(x).value()), sum_fn()(x)));
  }
  CHECK(s.inner(Str{}).is_epsilon());

  const FactorizationResult p = factorize(product_fn(), c);
  CHECK(p.verified());
  const Str x{2.0, 8.0};
  CHECK(approx_equal(p.inner(x), CoValue(4.0)));
  CHECK(approx_equal(p.outer[1].apply(Atom(4.0)), CoValue(16.0)));
  CHECK(approx_equal(p.outer[2].apply(Atom(3.0)), CoValue(27.0)));

  try {
    factorize(abs_mean(), c);
    FAIL("expected NotBPreassociative");
  } catch (const FactorizationError& e) {
    CHECK(e.code() == ErrorCode::not_b_preassociative);
    CHECK(e.report().failed());
  }
}

TEST_CASE("factorization round-trip on every eligible table with |X| = 2 and arity 2") {
  std::size_t eligible = 0;
  for (const VarFn& f : oracle::all_standard_tables(oracle::bits(), 2)) {
    if (!oracle::b_preassociative(f, 2) || !oracle::quasi_range_idempotent(f, 2)) {
      CHECK_THROWS_AS(factorize(f, cfg_len(2)), FactorizationError);
      continue;
    }
    ++eligible;
    const FactorizationResult r = factorize(f, cfg_len(2));
    CHECK(r.verified());
    CHECK(oracle::b_associative(r.inner, 2));
    for (const Str& x : oracle::strings_upto(f.domain().elements(), 2)) {
      if (x.empty()) continue;
      const CoValue h = r.inner(x);
      CHECK(r.outer[x.size() - 1].apply(h.value()) == f(x));
    }
    for (const OuterMap& o : r.outer) {
      REQUIRE(o.table);
      CHECK(o.table->injective());
    }
    // one-to-one diagonals exactly when every diagonal of H is the identity
    bool diag_injective = true, inner_identity = true;
    for (std::size_t n = 1; n <= 2; ++n) {
      diag_injective &= f(Str(n, Atom(0.0))) != f(Str(n, Atom(1.0)));
      inner_identity &= oracle::idempotent_at(r.inner, n);
    }
    CHECK(diag_injective == inner_identity);
  }
  CHECK(eligible > 0);
}

TEST_CASE("a composite of a B-associative operation and one-to-one outer maps factorizes back") {
  const VarFn h = tabulate(max_op(), {Atom(0.0), Atom(1.0), Atom(2.0)}, 3);
  // F_n = perm_n o H_n with a different bijection per arity
  const std::vector<std::vector<double>> perms{{2, 0, 1}, {1, 2, 0}, {0, 2, 1}};
  std::vector<CoValue> entries{CoValue::epsilon()};
  StringSpace sp(h.domain().elements(), 3);
  for (std::size_t i = 1; i < sp.size(); ++i) {
    const Str x = sp.at(i);
    entries.emplace_back(perms[x.size() - 1][std::size_t(real(h(x)))]);
  }
  const VarFn f = VarFn::tabulated(h.domain(), h.domain(), 3, entries);
  const FactorizationResult r = factorize(f, cfg_len(3));
  CHECK(r.verified());
  for (std::size_t i = 1; i < sp.size(); ++i) {
    const Str x = sp.at(i);
    CHECK(r.outer[x.size() - 1].apply(r.inner(x).value()) == f(x));
  }
  CHECK(oracle::b_associative(r.inner, 3));
}

TEST_CASE("idempotizable decomposition") {
  SearchConfig c = cfg_len(3);
  const IdempotizableFactor s = idempotizable_decompose(sum_fn(), 3, c);
  CHECK(approx_equal(s.h(Str{1.0, 2.0, 6.0}), CoValue(3.0)));
  CHECK(approx_equal(s.f(Atom(3.0)), CoValue(9.0)));
  const IdempotizableFactor m = idempotizable_decompose(arith_mean(), 2, c);
  CHECK(approx_equal(m.h(Str{1.0, 2.0}), CoValue(1.5)));
  CHECK(approx_equal(m.f(Atom(1.5)), CoValue(1.5)));
  // any idempotent H with F = delta o H coincides with the returned one
  const VarFn t = tabulate(first_proj(), {Atom(0.0), Atom(1.0)}, 2);
  const IdempotizableFactor u = idempotizable_decompose(t, 2, c);
  for (const Str& x : oracle::strings_of(t.domain().elements(), 2)) CHECK(u.h(x) == t(x));
  const VarFn k = tabulate(constant_fn(CoValue(1.0), oracle::bits()), {Atom(0.0), Atom(1.0)}, 2);
  try {
    idempotizable_decompose(k, 2, c);
    FAIL("expected DiagonalNotInjective");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::diagonal_not_injective);
  }
}

TEST_CASE("affine identifiability") {
  const AffineVerdict e = affine_identifiability(generators::log(), generators::affine_reparam(generators::log(), 2, 3));
  CHECK(e.equivalent);
  CHECK(std::abs(e.r - 2) <= 1e-9);
  CHECK(std::abs(e.s - 3) <= 1e-9);
  CHECK(e.fit_error <= 1e-9);

  const AffineVerdict i = affine_identifiability(generators::identity(), generators::identity());
  CHECK(i.equivalent);
  CHECK(std::abs(i.r - 1) <= 1e-9);
  CHECK(std::abs(i.s) <= 1e-9);

  const AffineVerdict d = affine_identifiability(generators::identity(), generators::cube());
  CHECK_FALSE(d.equivalent);
  REQUIRE(d.witness);
  REQUIRE(d.witness->lhs);
  REQUIRE(d.witness->rhs);
  CHECK_FALSE(approx_equal(*d.witness->lhs, *d.witness->rhs));
  // the midpoint of 0 and 2 under x^3 is not the arithmetic midpoint
  CHECK(std::abs(std::cbrt((0.0 + 8.0) / 2) - 1.0) > 0.5);

  GeneratorSpec flat = generators::identity();
  flat.f = [](double) { return 1.0; };
  CHECK_THROWS_AS(affine_identifiability(flat, generators::identity()), Error);
}
