#pragma once

// Independent brute-force oracles and small generators shared by the tests.
// None of this goes through the property engine.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "barylab/core.hpp"

namespace oracle {

using barylab::Atom;
using barylab::CoValue;
using barylab::DomainDesc;
using barylab::Str;
using barylab::VarFn;

inline DomainDesc bits() { return DomainDesc::finite({Atom(0.0), Atom(1.0)}); }
inline DomainDesc trits() { return DomainDesc::finite({Atom(0.0), Atom(1.0), Atom(2.0)}); }

inline std::size_t cells(std::size_t d, std::size_t max_arity) {
  std::size_t c = 1, p = 1;
  for (std::size_t n = 1; n <= max_arity; ++n) c += (p *= d);
  return c;
}

/// Every string of length exactly n over the atoms, first atom most significant.
inline std::vector<Str> strings_of(const std::vector<Atom>& xs, std::size_t n) {
  std::vector<Str> out{Str{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Str> next;
    for (const Str& s : out) {
      for (const Atom& a : xs) {
        Str t = s;
        t.push_back(a);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline std::vector<Str> strings_upto(const std::vector<Atom>& xs, std::size_t n) {
  std::vector<Str> out;
  for (std::size_t k = 0; k <= n; ++k) {
    auto s = strings_of(xs, k);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

/// Table from per-cell codes: code 0 is epsilon, code i > 0 is atom i - 1.
inline VarFn table_from_codes(const DomainDesc& X, std::size_t max_arity, const std::vector<std::size_t>& codes) {
  std::vector<CoValue> entries;
  for (std::size_t c : codes) entries.push_back(c == 0 ? CoValue::epsilon() : CoValue(X.elements()[c - 1]));
  return VarFn::tabulated(X, X, max_arity, std::move(entries), "t");
}

/// All epsilon-standard tables on X up to max_arity, in lexicographic order of entries.
inline std::vector<VarFn> all_standard_tables(const DomainDesc& X, std::size_t max_arity) {
  const std::size_t d = X.elements().size(), n = cells(d, max_arity);
  std::vector<VarFn> out;
  std::vector<std::size_t> codes(n, 1);
  codes[0] = 0;
  while (true) {
    out.push_back(table_from_codes(X, max_arity, codes));
    std::size_t i = n - 1;
    while (i >= 1 && codes[i] == d) codes[i--] = 1;
    if (i == 0) break;
    ++codes[i];
  }
  return out;
}

/// All tables into X u {epsilon}, default included.
inline std::vector<VarFn> all_tables_with_epsilon(const DomainDesc& X, std::size_t max_arity) {
  const std::size_t d = X.elements().size(), n = cells(d, max_arity);
  std::vector<VarFn> out;
  std::vector<std::size_t> codes(n, 0);
  while (true) {
    out.push_back(table_from_codes(X, max_arity, codes));
    std::size_t i = n;
    bool carried = true;
    while (carried && i-- > 0) {
      if (codes[i] < d) {
        ++codes[i];
        carried = false;
      } else {
        codes[i] = 0;
      }
    }
    if (carried) break;
  }
  return out;
}

inline VarFn random_standard_table(const DomainDesc& X, std::size_t max_arity, std::mt19937_64& rng) {
  const std::size_t d = X.elements().size();
  std::vector<std::size_t> codes(cells(d, max_arity));
  std::uniform_int_distribution<std::size_t> pick(1, d);
  for (std::size_t i = 1; i < codes.size(); ++i) codes[i] = pick(rng);
  return table_from_codes(X, max_arity, codes);
}

/// x v^n z, or nothing when v is neither epsilon nor a domain atom.
inline std::optional<Str> splice(const DomainDesc& X, const Str& x, const CoValue& v, std::size_t n, const Str& z) {
  Str out = x;
  if (!v.is_epsilon()) {
    if (!X.contains(v.value())) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) out.push_back(v.value());
  }
  out.insert(out.end(), z.begin(), z.end());
  return out;
}

inline Str cat(const Str& a, const Str& b, const Str& c = {}) {
  Str out = a;
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

/// F(x y z) = F(x F(y)^|y| z) for all x, y, z with |xyz| <= L.
inline bool b_associative(const VarFn& f, std::size_t L) {
  const auto& xs = f.domain().elements();
  for (std::size_t total = 0; total <= L; ++total) {
    for (std::size_t lx = 0; lx <= total; ++lx) {
      for (std::size_t ly = 0; lx + ly <= total; ++ly) {
        const std::size_t lz = total - lx - ly;
        for (const Str& x : strings_of(xs, lx)) {
          for (const Str& y : strings_of(xs, ly)) {
            for (const Str& z : strings_of(xs, lz)) {
              auto t = splice(f.domain(), x, f(y), ly, z);
              if (!t || f(*t) != f(cat(x, y, z))) return false;
            }
          }
        }
      }
    }
  }
  return true;
}

/// |y| = |y'| and F(y) = F(y') imply F(x y z) = F(x y' z), for |xyz| <= L.
inline bool b_preassociative(const VarFn& f, std::size_t L) {
  const auto& xs = f.domain().elements();
  for (std::size_t ly = 1; ly <= L; ++ly) {
    const auto ys = strings_of(xs, ly);
    for (std::size_t a = 0; a < ys.size(); ++a) {
      for (std::size_t b = a + 1; b < ys.size(); ++b) {
        if (f(ys[a]) != f(ys[b])) continue;
        for (std::size_t lx = 0; lx + ly <= L; ++lx) {
          for (std::size_t lz = 0; lx + ly + lz <= L; ++lz) {
            for (const Str& x : strings_of(xs, lx)) {
              for (const Str& z : strings_of(xs, lz)) {
                if (f(cat(x, ys[a], z)) != f(cat(x, ys[b], z))) return false;
              }
            }
          }
        }
      }
    }
  }
  return true;
}

/// F(F(x)^|x|) = F(x) for every nonempty x with |x| <= L.
inline bool range_idempotent(const VarFn& f, std::size_t L) {
  for (const Str& x : strings_upto(f.domain().elements(), L)) {
    if (x.empty()) continue;
    auto t = splice(f.domain(), {}, f(x), x.size(), {});
    if (!t || f(*t) != f(x)) return false;
  }
  return true;
}

/// ran(F_n) = ran(delta_n) for every 1 <= n <= L.
inline bool quasi_range_idempotent(const VarFn& f, std::size_t L) {
  const auto& xs = f.domain().elements();
  for (std::size_t n = 1; n <= L; ++n) {
    std::vector<CoValue> diag;
    for (const Atom& u : xs) diag.push_back(f(Str(n, u)));
    for (const Str& s : strings_of(xs, n)) {
      if (std::find(diag.begin(), diag.end(), f(s)) == diag.end()) return false;
    }
  }
  return true;
}

inline bool idempotent_at(const VarFn& f, std::size_t n) {
  for (const Atom& u : f.domain().elements()) {
    if (f(Str(n, u)) != CoValue(u)) return false;
  }
  return true;
}

inline bool same_function(const VarFn& f, const VarFn& g, std::size_t L) {
  for (const Str& s : strings_upto(f.domain().elements(), L)) {
    if (s.empty()) continue;
    if (f(s) != g(s)) return false;
  }
  return true;
}

inline double real(const CoValue& v) { return std::get<double>(v.value()); }

}  // namespace oracle
