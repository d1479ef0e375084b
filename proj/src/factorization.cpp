#include "barylab/factorization.hpp"

#include <algorithm>
#include <cmath>

namespace barylab {

namespace {

using nlohmann::json;

std::vector<CoValue> as_values(const std::vector<Atom>& atoms) {
  return {atoms.begin(), atoms.end()};
}

std::optional<std::size_t> find_value(const std::vector<CoValue>& set, const CoValue& v) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (approx_equal(set[i], v)) return i;
  }
  return std::nullopt;
}

PropertyReport verdict(std::string name, bool ok, std::string note = {}, std::optional<Witness> w = std::nullopt) {
  PropertyReport r;
  r.property = std::move(name);
  r.status = ok ? Status::pass : Status::fail;
  r.note = std::move(note);
  if (!ok) r.witness = w ? std::move(w) : Witness{};
  return r;
}

SearchConfig bounded(const SearchConfig& cfg, std::size_t max_len) {
  SearchConfig c = cfg;
  c.max_len = max_len;
  return c;
}

[[noreturn]] void throw_failed(ErrorCode code, const PropertyReport& r) {
  std::string what = r.property + " fails";
  if (r.witness) {
    const Witness& w = *r.witness;
    what += ": y = " + to_string(w.y);
    if (!w.y_prime.empty()) what += ", y' = " + to_string(w.y_prime);
    if (!w.x.empty() || !w.z.empty()) what += ", x = " + to_string(w.x) + ", z = " + to_string(w.z);
    if (w.lhs) what += ", lhs = " + to_string(*w.lhs);
    if (w.rhs) what += ", rhs = " + to_string(*w.rhs);
  }
  throw FactorizationError(code, what, r);
}

void require(const VarFn& f, PropertyId id, ErrorCode code, const SearchConfig& cfg) {
  PropertyReport r = check(f, id, cfg);
  if (r.budget_exceeded) throw Error(ErrorCode::budget_exceeded, r.property + ": " + r.note);
  if (r.status == Status::unsupported) throw Error(ErrorCode::unsupported, r.property + ": " + r.note);
  if (r.failed()) throw_failed(code, r);
}

/// Samples of a numeric domain on which the closed-form diagonal inverse is probed.
std::vector<Atom> numeric_samples(const VarFn& f, const SearchConfig& cfg) { return sample_alphabet(f.domain(), cfg); }

}  // namespace

// ---------------------------------------------------------------------------

FiniteMap FiniteMap::from_function(std::vector<CoValue> domain, std::vector<CoValue> codomain,
                                   const std::function<CoValue(const CoValue&)>& fn) {
  FiniteMap m{std::move(domain), std::move(codomain), {}};
  for (const CoValue& x : m.domain) {
    const CoValue y = fn(x);
    auto j = find_value(m.codomain, y);
    if (!j) throw Error(ErrorCode::domain_mismatch, "value " + to_string(y) + " is not in the map's codomain");
    m.image.push_back(*j);
  }
  return m;
}

std::optional<std::size_t> FiniteMap::domain_index(const CoValue& x) const { return find_value(domain, x); }
std::optional<std::size_t> FiniteMap::codomain_index(const CoValue& y) const { return find_value(codomain, y); }

const CoValue& FiniteMap::operator()(const CoValue& x) const {
  auto i = domain_index(x);
  if (!i) throw Error(ErrorCode::domain_mismatch, to_string(x) + " is outside the map's domain");
  return codomain[image[*i]];
}

std::vector<CoValue> FiniteMap::range() const {
  std::vector<bool> hit(codomain.size(), false);
  for (std::size_t j : image) hit[j] = true;
  std::vector<CoValue> out;
  for (std::size_t j = 0; j < codomain.size(); ++j) {
    if (hit[j]) out.push_back(codomain[j]);
  }
  return out;
}

bool FiniteMap::injective() const {
  std::vector<std::size_t> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

QuasiInverse quasi_inverse(const FiniteMap& f) {
  if (f.domain.empty()) throw Error(ErrorCode::empty_domain, "quasi-inverse of a map with empty domain");
  // least preimage of each codomain element, when it has one
  std::vector<std::optional<std::size_t>> pre(f.codomain.size());
  for (std::size_t i = 0; i < f.domain.size(); ++i) {
    if (!pre[f.image[i]]) pre[f.image[i]] = i;
  }
  std::size_t least_in_range = 0;
  while (!pre[least_in_range]) ++least_in_range;
  FiniteMap g{f.codomain, f.domain, {}};
  for (std::size_t j = 0; j < f.codomain.size(); ++j) g.image.push_back(pre[j] ? *pre[j] : *pre[least_in_range]);

  QuasiInverse q{f, std::move(g), {}};
  if (!is_quasi_inverse(q.f, q.g)) throw Error(ErrorCode::invalid_argument, "canonical quasi-inverse failed its check");
  q.certificate = {"f o g = id on ran(f)", "ran(g restricted to ran(f)) = ran(g)",
                   "f is a quasi-inverse of g (symmetry)"};
  if (!is_quasi_inverse(q.g, q.f)) q.certificate.pop_back();
  return q;
}

bool is_quasi_inverse(const FiniteMap& f, const FiniteMap& g) {
  const std::vector<CoValue> ran_f = f.range();
  std::vector<CoValue> ran_g_on_ran_f;
  for (const CoValue& y : ran_f) {
    auto gi = g.domain_index(y);
    if (!gi) return false;
    const CoValue& x = g.codomain[g.image[*gi]];
    auto fi = f.domain_index(x);
    if (!fi || !approx_equal(f.codomain[f.image[*fi]], y)) return false;
    if (!find_value(ran_g_on_ran_f, x)) ran_g_on_ran_f.push_back(x);
  }
  const std::vector<CoValue> ran_g = g.range();
  if (ran_g.size() != ran_g_on_ran_f.size()) return false;
  return std::all_of(ran_g.begin(), ran_g.end(), [&](const CoValue& x) { return find_value(ran_g_on_ran_f, x); });
}

std::vector<FiniteMap> all_quasi_inverses(const FiniteMap& f) {
  if (f.domain.empty()) throw Error(ErrorCode::empty_domain, "quasi-inverses of a map with empty domain");
  if (f.domain.size() > 4 || f.codomain.size() > 4) {
    throw Error(ErrorCode::invalid_argument, "quasi-inverse enumeration is limited to 4 elements per side");
  }
  std::vector<FiniteMap> out;
  const std::size_t m = f.codomain.size(), k = f.domain.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= k;
  for (std::size_t code = 0; code < total; ++code) {
    FiniteMap g{f.codomain, f.domain, std::vector<std::size_t>(m)};
    std::size_t rest = code;
    for (std::size_t j = m; j-- > 0;) {
      g.image[j] = rest % k;
      rest /= k;
    }
    if (is_quasi_inverse(f, g)) out.push_back(std::move(g));
  }
  return out;
}

std::vector<CoValue> observed_codomain(const VarFn& f, std::size_t max_len) {
  std::vector<CoValue> seen;
  bool has_eps = false;
  StringSpace space(f.domain().elements(), max_len);
  for (std::size_t i = 1; i < space.size(); ++i) {
    const CoValue v = f(space.at(i));
    if (v.is_epsilon()) {
      has_eps = true;
    } else if (!find_value(seen, v)) {
      seen.push_back(v);
    }
  }
  std::vector<CoValue> out;
  if (has_eps) out.push_back(CoValue::epsilon());
  if (f.codomain().is_finite()) {
    for (const Atom& a : f.codomain().elements()) out.emplace_back(a);
    for (const CoValue& v : seen) {
      if (!find_value(out, v)) out.push_back(v);
    }
    return out;
  }
  if (std::all_of(seen.begin(), seen.end(), [](const CoValue& v) { return std::holds_alternative<double>(v.value()); })) {
    std::sort(seen.begin(), seen.end(), [](const CoValue& a, const CoValue& b) { return a.real() < b.real(); });
  }
  out.insert(out.end(), seen.begin(), seen.end());
  return out;
}

FiniteMap diagonal_map(const VarFn& f, std::size_t n, const std::vector<CoValue>& codomain) {
  return FiniteMap::from_function(as_values(f.domain().elements()), codomain,
                                  [&](const CoValue& x) { return f(Str(n, x.value())); });
}

// ---------------------------------------------------------------------------

RangeFactor range_idempotent_factor(const VarFn& f, std::size_t n, const QuasiInverse& q) {
  if (!f.domain().is_finite()) throw Error(ErrorCode::unsupported, "table quasi-inverses need a finite domain");
  const auto& X = f.domain().elements();
  StringSpace space(X, n);
  const FiniteMap& delta = q.f;
  const std::vector<CoValue> ran_delta = delta.range();
  RangeFactor r;
  r.arity = n;
  for (std::size_t i = space.offset(n); i < space.size(); ++i) {
    const Str x = space.at(i);
    const CoValue v = f(x);
    if (!find_value(ran_delta, v)) {
      PropertyReport rep;
      rep.property = "quasi_range_idempotent(" + std::to_string(n) + ")";
      rep.status = Status::fail;
      Witness w;
      w.y = x;
      w.lhs = v;
      w.note = "value in ran(F_n) but not in ran(delta_n)";
      rep.witness = w;
      throw FactorizationError(ErrorCode::not_quasi_range_idempotent,
                               "value " + to_string(v) + " = F(" + to_string(x) + ") is not in ran(delta_" +
                                   std::to_string(n) + ")",
                               rep);
    }
    r.table.push_back(q.g(v));
  }
  auto table = std::make_shared<std::vector<CoValue>>(r.table);
  auto sp = std::make_shared<StringSpace>(space);
  r.h = [table, sp, n](std::span<const Atom> x) -> CoValue {
    auto idx = sp->index_of(x);
    if (!idx || x.size() != n) throw Error(ErrorCode::domain_mismatch, "H_n evaluated off its table");
    return (*table)[*idx - sp->offset(n)];
  };

  r.reconstructs = r.range_idempotent = true;
  std::vector<CoValue> ran_h;
  for (std::size_t i = 0; i < r.table.size(); ++i) {
    const Str x = space.at(space.offset(n) + i);
    const CoValue& h = r.table[i];
    if (!approx_equal(delta(h), f(x))) r.reconstructs = false;
    // delta_{H_n}(H_n(x)) = H_n(h^n)
    if (!approx_equal(r.h(Str(n, h.value())), h)) r.range_idempotent = false;
    if (!find_value(ran_h, h)) ran_h.push_back(h);
  }
  std::vector<CoValue> images;
  r.diagonal_injective_on_range = true;
  for (const CoValue& h : ran_h) {
    const CoValue& y = delta(h);
    if (find_value(images, y)) r.diagonal_injective_on_range = false;
    images.push_back(y);
  }
  return r;
}

RangeFactor range_idempotent_factor(const VarFn& f, std::size_t n, const SearchConfig& cfg) {
  if (f.domain().is_finite()) {
    const auto cod = observed_codomain(f, n);
    return range_idempotent_factor(f, n, quasi_inverse(diagonal_map(f, n, cod)));
  }
  const DiagonalInverse& inv = f.diagonal_inverse();
  if (!inv) throw Error(ErrorCode::unsupported, f.name() + " has no closed-form diagonal inverse");
  RangeFactor r;
  r.arity = n;
  r.h = [f, n](std::span<const Atom> x) -> CoValue {
    if (x.size() != n) throw Error(ErrorCode::arity_mismatch, "H_n takes exactly n arguments");
    const CoValue v = f(x);
    auto u = f.diagonal_inverse()(n, v);
    if (!u) throw Error(ErrorCode::not_quasi_range_idempotent, to_string(v) + " is not in ran(delta_n)");
    return *u;
  };
  const Tolerance tol = cfg.tol;
  const VarFn copy = f;
  auto h = r.h;
  PropertyReport qri = check_identity(f, "quasi_range_idempotent(" + std::to_string(n) + ")", cfg, n, n,
                                      [&](const Str& x) -> std::optional<Witness> {
                                        const CoValue v = copy(x);
                                        auto u = copy.diagonal_inverse()(n, v);
                                        if (u && copy.domain().contains(*u) && approx_equal(copy(Str(n, *u)), v, tol)) {
                                          return std::nullopt;
                                        }
                                        Witness w;
                                        w.y = x;
                                        w.lhs = v;
                                        return w;
                                      });
  if (qri.failed()) {
    throw FactorizationError(ErrorCode::not_quasi_range_idempotent,
                             "value " + to_string(*qri.witness->lhs) + " is not in ran(delta_" + std::to_string(n) + ")",
                             qri);
  }
  auto rec = check_identity(f, "reconstruction", cfg, n, n, [&](const Str& x) -> std::optional<Witness> {
    const CoValue hv = h(x);
    if (approx_equal(copy(Str(n, hv.value())), copy(x), tol)) return std::nullopt;
    return Witness{};
  });
  auto ri = check_identity(f, "range_idempotent", cfg, n, n, [&](const Str& x) -> std::optional<Witness> {
    const CoValue hv = h(x);
    if (approx_equal(h(Str(n, hv.value())), hv, tol)) return std::nullopt;
    return Witness{};
  });
  r.reconstructs = rec.passed();
  r.range_idempotent = ri.passed();
  // delta_n o u = delta_n o v with u, v in ran(H_n) forces u = v
  r.diagonal_injective_on_range = true;
  const auto pts = numeric_samples(f, cfg);
  for (const Atom& u : pts) {
    auto back = inv(n, f(Str(n, u)));
    if (!back || !approx_equal(*back, u, tol)) r.diagonal_injective_on_range = false;
  }
  return r;
}

// ---------------------------------------------------------------------------

bool FactorizationResult::verified() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyReport& r) { return r.passed(); });
}

namespace {

FactorizationResult factorize_finite(const VarFn& f, const SearchConfig& cfg) {
  std::size_t L = effective_max_len(f, cfg);
  const VarFn t = f.is_tabulated() ? f : tabulate(f, f.domain().elements(), L);
  L = std::min(L, *t.max_arity());
  const SearchConfig c = bounded(cfg, L);

  require(t, PropertyId::b_preassociative, ErrorCode::not_b_preassociative, c);
  require(t, PropertyId::arity_wise_quasi_range_idempotent, ErrorCode::not_quasi_range_idempotent, c);

  const auto& X = t.domain().elements();
  const std::vector<CoValue> Y = observed_codomain(t, L);
  StringSpace space(X, L);
  std::vector<CoValue> entries{CoValue::epsilon()};
  std::vector<QuasiInverse> qs;
  for (std::size_t n = 1; n <= L; ++n) {
    qs.push_back(quasi_inverse(diagonal_map(t, n, Y)));
    RangeFactor rf = range_idempotent_factor(t, n, qs.back());
    entries.insert(entries.end(), rf.table.begin(), rf.table.end());
  }
  FactorizationResult res{VarFn::tabulated(t.domain(), t.domain(), L, entries, "factor_inner")
                              .with_name("factor_inner", json{{"of", f.name()}})
                              .with_epsilon_standard_claim(true),
                          {}, {}, {}};
  const VarFn& H = res.inner;

  bool all_injective = true, quasi = true;
  std::string inj_note, quasi_note;
  for (std::size_t n = 1; n <= L; ++n) {
    const FiniteMap& delta = qs[n - 1].f;
    std::vector<CoValue> ran_h;
    for (std::size_t i = space.offset(n); i < space.offset(n) + space.count(n); ++i) {
      const CoValue h = entries[i];
      if (!find_value(ran_h, h)) ran_h.push_back(h);
    }
    // keep the domain order of X
    std::vector<CoValue> dom;
    for (const Atom& a : X) {
      if (find_value(ran_h, CoValue(a))) dom.emplace_back(a);
    }
    FiniteMap fn = FiniteMap::from_function(dom, Y, [&](const CoValue& x) { return delta(x); });
    if (!fn.injective()) {
      all_injective = false;
      inj_note = "f_" + std::to_string(n) + " is not one-to-one";
    }
    // f_n^-1 defined on ran(f_n) = ran(delta_n)
    FiniteMap inverse{fn.range(), dom, {}};
    for (const CoValue& y : inverse.domain) {
      for (std::size_t i = 0; i < dom.size(); ++i) {
        if (approx_equal(fn(dom[i]), y)) {
          inverse.image.push_back(i);
          break;
        }
      }
    }
    if (!is_quasi_inverse(delta, inverse)) {
      quasi = false;
      quasi_note = "f_" + std::to_string(n) + "^-1 is not a quasi-inverse of delta_" + std::to_string(n);
    }
    OuterMap om;
    om.arity = n;
    om.apply = [fn](const Atom& a) { return fn(CoValue(a)); };
    om.table = std::move(fn);
    om.description = "delta_" + std::to_string(n) + " restricted to ran(H_" + std::to_string(n) + ")";
    res.outer.push_back(std::move(om));
  }

  res.checks.push_back(check(H, PropertyId::b_associative, c));
  res.checks.back().property = "inner_b_associative";
  res.checks.push_back(verdict("outer_injective", all_injective, inj_note));
  std::optional<Witness> bad;
  for (std::size_t i = 1; i < space.size() && !bad; ++i) {
    const Str x = space.at(i);
    const CoValue back = res.outer[x.size() - 1].apply(H(x).value());
    if (!approx_equal(back, t(x))) {
      Witness w;
      w.y = x;
      w.lhs = t(x);
      w.rhs = back;
      bad = w;
    }
  }
  res.checks.push_back(verdict("reconstruction", !bad, {}, bad));
  res.checks.push_back(verdict("outer_inverse_is_quasi_inverse", quasi, quasi_note));
  res.convention = "g_n is the least-preimage quasi-inverse of delta_n; H(epsilon) = epsilon";
  return res;
}

FactorizationResult factorize_numeric(const VarFn& f, const SearchConfig& cfg) {
  if (!f.diagonal_inverse()) {
    throw Error(ErrorCode::unsupported, f.name() + ": numeric factorization needs a closed-form diagonal inverse");
  }
  require(f, PropertyId::b_preassociative, ErrorCode::not_b_preassociative, cfg);
  require(f, PropertyId::arity_wise_quasi_range_idempotent, ErrorCode::not_quasi_range_idempotent, cfg);
  const std::size_t L = effective_max_len(f, cfg);

  FactorizationResult res{VarFn::closed_form(
                  "factor_inner", json{{"of", f.name()}}, f.domain(), f.domain(),
                  [f](std::span<const Atom> x) -> CoValue {
                    auto u = f.diagonal_inverse()(x.size(), f(x));
                    if (!u) throw Error(ErrorCode::not_quasi_range_idempotent, "value outside ran(delta_n)");
                    return *u;
                  },
                  f.max_arity())
                  .with_epsilon_standard_claim(true)
                  .with_diagonal_inverse([d = f.domain()](std::size_t, const CoValue& y) -> std::optional<Atom> {
                    if (y.is_epsilon() || !d.contains(y.value())) return std::nullopt;
                    return y.value();
                  }),
      {}, {}, {}};
  for (std::size_t n = 1; n <= L; ++n) {
    OuterMap om;
    om.arity = n;
    om.apply = [f, n](const Atom& a) { return f(Str(n, a)); };
    om.description = "delta_" + std::to_string(n) + " of " + f.name();
    res.outer.push_back(std::move(om));
  }
  const VarFn& H = res.inner;
  res.checks.push_back(check(H, PropertyId::b_associative, cfg));
  res.checks.back().property = "inner_b_associative";

  const Tolerance tol = cfg.tol;
  const auto pts = numeric_samples(f, cfg);
  bool injective = true, quasi = true;
  std::string note;
  for (std::size_t n = 1; n <= L; ++n) {
    for (const Atom& u : pts) {
      const CoValue y = f(Str(n, u));
      auto back = f.diagonal_inverse()(n, y);
      if (!back || !approx_equal(*back, u, tol)) {
        injective = false;
        note = "delta_" + std::to_string(n) + " is not inverted at " + to_string(u);
      }
      if (!back || !approx_equal(f(Str(n, *back)), y, tol)) quasi = false;
    }
  }
  res.checks.push_back(verdict("outer_injective", injective, note));
  const auto outer = res.outer;
  PropertyReport rec = check_identity(f, "reconstruction", cfg, 1, L, [&](const Str& x) -> std::optional<Witness> {
    const CoValue v = f(x);
    const CoValue back = outer[x.size() - 1].apply(H(x).value());
    if (approx_equal(v, back, tol)) return std::nullopt;
    Witness w;
    w.y = x;
    w.lhs = v;
    w.rhs = back;
    return w;
  });
  res.checks.push_back(std::move(rec));
  res.checks.push_back(verdict("outer_inverse_is_quasi_inverse", quasi));
  res.convention = "g_n is the closed-form inverse of delta_n; H(epsilon) = epsilon";
  return res;
}

}  // namespace

FactorizationResult factorize(const VarFn& f, const SearchConfig& cfg) {
  return f.domain().is_finite() ? factorize_finite(f, cfg) : factorize_numeric(f, cfg);
}

IdempotizableFactor idempotizable_decompose(const VarFn& f, std::size_t n, const SearchConfig& cfg) {
  IdempotizableFactor out;
  out.arity = n;
  out.f = [f, n](const Atom& a) { return f(Str(n, a)); };
  if (f.domain().is_finite()) {
    const auto cod = observed_codomain(f, n);
    FiniteMap delta = diagonal_map(f, n, cod);
    if (!delta.injective()) {
      throw Error(ErrorCode::diagonal_not_injective, "delta_" + std::to_string(n) + " of " + f.name() +
                                                         " is not one-to-one");
    }
    RangeFactor rf = range_idempotent_factor(f, n, quasi_inverse(delta));
    out.h = rf.h;
    out.table = std::move(rf.table);
    return out;
  }
  if (!f.diagonal_inverse()) throw Error(ErrorCode::unsupported, f.name() + " has no closed-form diagonal inverse");
  for (const Atom& u : numeric_samples(f, cfg)) {
    auto back = f.diagonal_inverse()(n, f(Str(n, u)));
    if (!back || !approx_equal(*back, u, cfg.tol)) {
      throw Error(ErrorCode::diagonal_not_injective,
                  "delta_" + std::to_string(n) + " of " + f.name() + " is not one-to-one near " + to_string(u));
    }
  }
  RangeFactor rf = range_idempotent_factor(f, n, cfg);
  out.h = rf.h;
  return out;
}

// ---------------------------------------------------------------------------

AffineVerdict affine_identifiability(const GeneratorSpec& g1, const GeneratorSpec& g2, const SearchConfig& cfg,
                                     std::size_t max_arity) {
  validate_generator(g1, max_arity);
  validate_generator(g2, max_arity);
  if (!(g1.interval == g2.interval)) {
    throw Error(ErrorCode::invalid_argument, "generators live on different intervals");
  }
  auto [lo, hi] = sample_window(g1.interval);
  const double q1 = lo + 0.25 * (hi - lo), q3 = lo + 0.75 * (hi - lo);
  const double t1 = g1.f(q1), t2 = g1.f(q3);
  if (!(std::abs(t2 - t1) > 0.0)) throw Error(ErrorCode::degenerate_fit, "fit points coincide under the generator");
  AffineVerdict v;
  // phi = g2 o g1^-1 at t = g1(x) is g2(x)
  v.r = (g2.f(q3) - g2.f(q1)) / (t2 - t1);
  v.s = g2.f(q1) - v.r * t1;
  if (!(std::abs(v.r) > 0.0) || !std::isfinite(v.r)) throw Error(ErrorCode::degenerate_fit, "fitted slope is zero");

  std::vector<double> xs;
  for (int i = 1; i < 16; ++i) xs.push_back(lo + (hi - lo) * i / 16.0);
  for (const Atom& a : core_alphabet(DomainDesc::interval(g1.interval))) xs.push_back(std::get<double>(a));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
  double worst = 0.0;
  std::string where;
  for (double x : xs) {
    const double t = g1.f(x);
    if (double e = rel(g2.f(x), v.r * t + v.s); e > worst) {
      worst = e;
      where = "g2 o g1^-1 at x = " + to_string(Atom{x});
    }
    for (std::size_t n = 1; n <= max_arity; ++n) {
      const double back = g2.apply_outer_inv(n, g1.apply_outer(n, t));
      if (double e = rel(back, v.r * t + v.s); !(e <= worst)) {
        worst = std::isfinite(e) ? e : INFINITY;
        where = "g2_n^-1 o g1_n at n = " + std::to_string(n) + ", t = " + to_string(Atom{t});
      }
    }
  }
  v.fit_error = worst;
  v.equivalent = worst <= 1e-9;
  if (v.equivalent) {
    v.detail = "g2 = r g1 + s with matching outer maps";
    return v;
  }
  v.detail = "largest deviation " + to_string(Atom{worst}) + " (" + where + ")";
  // A two-point mean that differs; this is a failure of Jensen's equality for g2 o g1^-1.
  const VarFn m1 = pre_mean(g1), m2 = pre_mean(g2);
  for (std::size_t i = 0; i < xs.size() && !v.witness; ++i) {
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      const Str s{xs[i], xs[j]};
      const CoValue a = m1(s), b = m2(s);
      if (!approx_equal(a, b, cfg.tol)) {
        Witness w;
        w.y = s;
        w.lhs = a;
        w.rhs = b;
        w.note = "means of the two generators differ, so g2 o g1^-1 violates Jensen's equality at the images";
        v.witness = w;
        break;
      }
    }
  }
  return v;
}

}  // namespace barylab
