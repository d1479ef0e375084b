// One line per acceptance criterion; exit status 1 when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "barylab/builtins.hpp"
#include "barylab/construct.hpp"
#include "barylab/factorization.hpp"
#include "barylab/properties.hpp"
#include "support.hpp"

using namespace barylab;
using oracle::real;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  std::string info;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

SearchConfig cfg_len(std::size_t n, std::size_t samples = 10'000) {
  SearchConfig c;
  c.max_len = n;
  c.samples = samples;
  return c;
}

double mean_of(const Str& x) {
  double s = 0;
  for (const Atom& a : x) s += std::get<double>(a);
  return s / double(x.size());
}

bool within(double got, double want, double rel) {
  return std::abs(got - want) <= std::max(rel * std::abs(want), 1e-12);
}

std::size_t witness_len(const Witness& w) { return w.x.size() + w.y.size() + w.z.size(); }

std::vector<std::string> entries_key(const VarFn& f) {
  std::vector<std::string> k;
  for (const CoValue& v : f.table_entries()) k.push_back(to_string(v));
  return k;
}

// The same witness strings read back through a direct evaluation.
bool preassoc_witness_holds(const VarFn& f, const Witness& w) {
  if (w.y.size() != w.y_prime.size() || f(w.y) != f(w.y_prime)) return false;
  return f(oracle::cat(w.x, w.y, w.z)) != f(oracle::cat(w.x, w.y_prime, w.z));
}

Outcome counterexamples() {
  Outcome o;
  const VarFn h = clamped_sum();
  o.require(h({-1.0, -2.0}) == CoValue(0.0) && h({-1.0, 1.0}) == CoValue(0.0), "clamped_sum pair values");
  o.require(h({-1.0, -2.0, 1.0}) == CoValue(0.0) && h({-1.0, 1.0, 1.0}) == CoValue(1.0), "clamped_sum extensions");
  const PropertyReport rh = check(h, PropertyId::b_preassociative, cfg_len(4));
  o.require(rh.failed() && rh.witness, "clamped_sum not rejected");
  if (rh.witness) {
    o.require(witness_len(*rh.witness) <= 3, "clamped_sum witness longer than the documented one");
    o.require(preassoc_witness_holds(h, *rh.witness), "clamped_sum witness does not reproduce");
  }

  const VarFn a = abs_mean();
  o.require(a({1.0}) == a({-1.0}), "abs_mean unary values");
  o.require(a({1.0, 1.0}) == CoValue(1.0) && a({1.0, -1.0}) == CoValue(0.0), "abs_mean binary values");
  const PropertyReport ra = check(a, PropertyId::b_preassociative, cfg_len(4));
  o.require(ra.failed() && ra.witness, "abs_mean not rejected");
  if (ra.witness) {
    o.require(witness_len(*ra.witness) <= 2, "abs_mean witness longer than the documented one");
    o.require(preassoc_witness_holds(a, *ra.witness), "abs_mean witness does not reproduce");
  }
  return o;
}

Outcome positive_claims() {
  Outcome o;
  const SearchConfig c = cfg_len(6, 10'000);
  std::vector<std::pair<std::string, VarFn>> assoc{
      {"arith_mean", arith_mean()}, {"geom_mean", geom_mean()}, {"harm_mean", harm_mean()},
      {"barycenter(2)", barycenter(2)}};
  for (double z : {-1.0, 0.3, 0.5, 1.0, 2.0}) assoc.emplace_back("m_z(" + std::to_string(z) + ")", m_z(z));
  for (const auto& [name, f] : assoc) {
    const PropertyReport r = check(f, PropertyId::b_associative, c);
    o.require(r.passed(), name + " b_associative: " + std::string(to_string(r.status)));
    o.require(r.space.max_len == 6 && r.space.instances >= 10'000, name + " search space too small");
  }
  for (const auto& [name, f] : std::vector<std::pair<std::string, VarFn>>{
           {"sum", sum_fn()}, {"product", product_fn()}, {"length_fn", length_fn()}}) {
    const PropertyReport r = check(f, PropertyId::b_preassociative, c);
    o.require(r.passed(), name + " b_preassociative: " + std::string(to_string(r.status)));
    o.require(r.space.max_len == 6 && r.space.instances >= 10'000, name + " search space too small");
  }
  return o;
}

Outcome equivalence_agreement() {
  Outcome o;
  std::size_t n = 0, verdicts = 0, b_assoc = 0;
  auto tally = [&](const std::vector<EquivalenceOutcome>& out) {
    for (const EquivalenceOutcome& e : out) verdicts += e.verdicts.size();
    b_assoc += !out.empty() && !out.front().verdicts.empty() && out.front().verdicts.front().second == Status::pass;
    return all_agree(out);
  };
  for (const VarFn& f : oracle::all_standard_tables(oracle::bits(), 2)) {
    o.require(tally(check_equivalence_suite(f, cfg_len(2))), "disagreement at arity 2 on table " + std::to_string(n));
    ++n;
  }
  o.require(n == 64, "expected 64 tables");
  std::mt19937_64 rng(kDefaultSeed);
  for (int i = 0; i < 500; ++i) {
    const VarFn f = oracle::random_standard_table(oracle::bits(), 3, rng);
    o.require(tally(check_equivalence_suite(f, cfg_len(3))), "disagreement at arity 3 on sample " + std::to_string(i));
  }
  o.info = std::to_string(n + 500) + " operations, " + std::to_string(verdicts) + " verdicts, " +
           std::to_string(b_assoc) + " B-associative";
  return o;
}

Outcome factorization_round_trip() {
  Outcome o;
  std::size_t eligible = 0, recovered = 0;
  for (const VarFn& f : oracle::all_standard_tables(oracle::bits(), 3)) {
    if (!oracle::b_preassociative(f, 3) || !oracle::quasi_range_idempotent(f, 3)) continue;
    ++eligible;
    try {
      const FactorizationResult r = factorize(f, cfg_len(3));
      bool good = r.verified() && oracle::b_associative(r.inner, 3) && r.outer.size() == 3;
      for (const OuterMap& m : r.outer) good = good && m.table && m.table->injective();
      for (const Str& x : oracle::strings_upto(f.domain().elements(), 3)) {
        if (!good || x.empty()) continue;
        const CoValue h = r.inner(x);
        good = !h.is_epsilon() && r.outer[x.size() - 1].apply(h.value()) == f(x);
      }
      recovered += good;
    } catch (const Error&) {
    }
  }
  o.require(eligible > 0 && recovered == eligible,
            std::to_string(recovered) + " of " + std::to_string(eligible) + " eligible tables recovered");
  o.info = std::to_string(recovered) + "/" + std::to_string(eligible) + " eligible tables recovered";

  const std::vector<Str> grid{Str{1.0}, Str{0.5, 2.0}, Str{3.0, 0.25, 4.0}, Str{2.0, 7.0, 1.5, 9.0},
                              Str{1.0, 2.0, 3.0, 4.0, 5.0}};
  const FactorizationResult s = factorize(sum_fn(), cfg_len(5));
  o.require(s.verified(), "factorize(sum) not verified");
  const FactorizationResult p = factorize(product_fn(), cfg_len(5));
  o.require(p.verified(), "factorize(product) not verified");
  for (const Str& x : grid) {
    const std::size_t n = x.size();
    if (n > s.outer.size() || n > p.outer.size()) {
      o.require(false, "outer maps missing at arity " + std::to_string(n));
      break;
    }
    const double am = mean_of(x);
    double gm = 0;
    for (const Atom& a : x) gm += std::log(std::get<double>(a));
    gm = std::exp(gm / double(n));
    o.require(within(real(s.inner(x)), am, 1e-12), "sum inner is not the arithmetic mean");
    o.require(within(real(s.outer[n - 1].apply(Atom(am))), double(n) * am, 1e-12), "sum outer is not n x");
    o.require(within(real(p.inner(x)), gm, 1e-12), "product inner is not the geometric mean");
    o.require(within(real(p.outer[n - 1].apply(Atom(gm))), std::pow(gm, double(n)), 1e-12), "product outer is not x^n");
  }
  return o;
}

Outcome section_reconstruction() {
  Outcome o;
  const std::vector<double> pts{-2.0, -0.5, 0.0, 1.0, 3.5};
  for (double z : {0.5, 2.0}) {
    const Construction c = from_sections(mz_section_spec(z), 5, cfg_len(5, 2000));
    o.require(c.ok() && c.function, "from_sections status " + std::string(to_string(c.status)));
    if (!c.function) continue;
    const VarFn mz = m_z(z);
    for (std::size_t n = 1; n <= 5; ++n) {
      for (const Str& x : oracle::strings_of({pts.begin(), pts.end()}, n)) {
        o.require(within(real((*c.function)(x)), real(mz(x)), 1e-9), "G differs from m_z at arity " + std::to_string(n));
      }
    }
  }
  for (double z : {-1.0, 0.3, 0.5, 1.0, 2.0}) {
    std::vector<double> a{0.0, 1.0}, b{0.0, 1.0};
    for (std::size_t k = 1; k <= 5; ++k) {
      const SectionCoeffs s = mz_section_coeffs(z, k);
      o.require(s.a + s.b == 1.0, "a + b != 1 exactly");
      a.push_back(s.a);
      b.push_back(s.b);
    }
    for (std::size_t k = 2; k <= 5; ++k) {
      double prod = 1.0;
      for (std::size_t j = 1; j <= k + 1; ++j) prod *= a[j];
      for (std::size_t i = 2; i <= k + 1; ++i) {
        o.require(std::abs(a[k + 1] * b[i] - a[i] * b[i - 1] * (1 - prod)) <= 1e-9, "coefficient system violated");
      }
    }
  }
  return o;
}

Outcome enumeration_agreement() {
  Outcome o;
  const DomainDesc X = oracle::bits();
  const Enumeration e = enumerate_b_associative(X, 2);
  std::set<std::vector<std::string>> got, want;
  for (const VarFn& f : e.operations) got.insert(entries_key(f));
  std::uint64_t total = 0;
  for (const VarFn& f : oracle::all_standard_tables(X, 2)) {
    ++total;
    if (oracle::b_associative(f, 2)) want.insert(entries_key(f));
  }
  o.require(got == want, "operation sets differ");
  o.info = std::to_string(got.size()) + " of " + std::to_string(total) + " tables B-associative";
  o.require(e.census.total == total && e.census.b_associative == want.size(), "census counts differ");
  const Enumeration u = enumerate_b_associative(X, 1);
  o.require(u.census.total == 4 && u.census.b_associative == 3, "unary census is not 3 of 4");
  return o;
}

VarFn mixed_mean() {
  return VarFn::closed_form("mixed_mean", nlohmann::json::object(), DomainDesc::interval(Interval::positive()),
                            DomainDesc::interval(Interval::positive()),
                            [](std::span<const Atom> s) -> CoValue {
                              if (s.empty()) return CoValue::epsilon();
                              const Str x(s.begin(), s.end());
                              if (x.size() % 2 == 0) return CoValue(mean_of(x));
                              double l = 0;
                              for (const Atom& a : x) l += std::log(std::get<double>(a));
                              return CoValue(std::exp(l / double(x.size())));
                            });
}

Outcome representation_checks() {
  Outcome o;
  const SearchConfig c = cfg_len(4, 10'000);
  const VarFn q = quasi_arithmetic(generators::log());
  o.require(check(q, Property{PropertyId::symmetric, 3}, c).passed(), "ln mean not symmetric");
  o.require(check(q, PropertyId::idempotent, c).passed(), "ln mean not idempotent");
  o.require(check(q, Property{PropertyId::strictly_increasing, 3}, c).passed(), "ln mean not strictly increasing");
  o.require(check(q, PropertyId::b_associative, c).passed(), "ln mean not B-associative");

  const VarFn pm = pre_mean(generators::with_scaled_outer(generators::identity()));
  o.require(check(pm, PropertyId::b_preassociative, c).passed(), "scaled pre-mean not B-preassociative");
  const FactorizationResult r = factorize(pm, c);
  o.require(r.verified(), "scaled pre-mean factorization not verified");
  for (const Str& x : {Str{1.0, 2.0}, Str{-1.0, 4.0, 0.5}}) {
    o.require(within(real(r.inner(x)), mean_of(x), 1e-12), "inner is not the arithmetic mean");
    o.require(within(real(r.outer[x.size() - 1].apply(Atom(mean_of(x)))), double(x.size()) * mean_of(x), 1e-12),
              "outer is not n x");
  }

  const VarFn mixed = mixed_mean();
  const PropertyReport m = check(mixed, PropertyId::b_preassociative, c);
  o.require(m.failed() && m.witness, "mixed generator not rejected");
  if (m.witness) o.require(witness_reproduces(mixed, m), "mixed generator witness does not reproduce");
  return o;
}

Outcome affine() {
  Outcome o;
  for (const GeneratorSpec& g : {generators::log(), generators::identity(), generators::cube()}) {
    const AffineVerdict v = affine_identifiability(g, generators::affine_reparam(g, 2, 3));
    o.require(v.equivalent, g.name + ": pair not equivalent");
    o.require(std::abs(v.r - 2) <= 1e-9 && std::abs(v.s - 3) <= 1e-9, g.name + ": wrong r, s");
    o.require(std::abs(v.fit_error) <= 1e-9, g.name + ": fit error too large");
  }
  const AffineVerdict d = affine_identifiability(generators::identity(), generators::cube());
  o.require(!d.equivalent, "id and cube reported equivalent");
  o.require(d.witness && d.witness->lhs && d.witness->rhs && !approx_equal(*d.witness->lhs, *d.witness->rhs),
            "id and cube: no disagreeing witness");
  if (d.witness && d.witness->y.size() == 2) {
    const Str& y = d.witness->y;
    o.require(approx_equal(arith_mean()(y), *d.witness->lhs), "witness lhs is not the arithmetic mean");
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 counterexamples reproduced", 1.0, counterexamples},
      {"2 positive claims", 30.0, positive_claims},
      {"3 equivalence agreement", 120.0, equivalence_agreement},
      {"4 factorization round-trip", 0.0, factorization_round_trip},
      {"5 section reconstruction", 0.0, section_reconstruction},
      {"6 enumeration oracle agreement", 0.0, enumeration_agreement},
      {"7 representation direction checks", 30.0, representation_checks},
      {"8 affine identifiability", 0.0, affine},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    } catch (const BudgetExhausted&) {
      o.ok = false;
      o.detail = "evaluation budget exhausted";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) o.require(false, "runtime over " + std::to_string(c.limit_s) + " s");
    std::printf("[%s] %-36s %8.3f s  %s\n", o.ok ? "PASS" : "FAIL", c.name, secs,
                o.ok ? o.info.c_str() : o.detail.c_str());
    failed += !o.ok;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
