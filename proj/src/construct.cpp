#include "barylab/construct.hpp"

#include <algorithm>
#include <numeric>

#include "barylab/builtins.hpp"
#include "barylab/io.hpp"

namespace barylab {

namespace {

std::vector<Atom> probe_alphabet(const DomainDesc& d, const SearchConfig& cfg) {
  return d.is_finite() ? d.elements() : sample_alphabet(d, cfg);
}

std::size_t per_length_samples(const SearchConfig& cfg, std::size_t lengths) {
  return std::max<std::size_t>(cfg.samples / std::max<std::size_t>(lengths, 1), 64);
}

SearchConfig bounded(const SearchConfig& cfg, std::size_t max_len) {
  SearchConfig c = cfg;
  c.max_len = max_len;
  return c;
}

Witness pair_witness(Str x, Str y, Str z, std::optional<CoValue> lhs, std::optional<CoValue> rhs, std::string note) {
  Witness w;
  w.x = std::move(x);
  w.y = std::move(y);
  w.z = std::move(z);
  w.lhs = std::move(lhs);
  w.rhs = std::move(rhs);
  w.note = std::move(note);
  return w;
}

/// First string of length n (probe order) where `fn` reports a violation.
std::optional<Witness> first_violation(const DomainDesc& d, std::size_t n, const SearchConfig& cfg,
                                       std::size_t random_count, const StringCheck& fn) {
  for (const Str& s : probe_strings(d, n, cfg, d.is_finite() ? 0 : random_count)) {
    if (auto w = fn(s)) return w;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(ConstructionStatus s) {
  switch (s) {
    case ConstructionStatus::ok: return "ok";
    case ConstructionStatus::phi1_not_retraction: return "Phi1NotRetraction";
    case ConstructionStatus::condition_a_violated: return "ConditionAViolated";
    case ConstructionStatus::condition_b_awri: return "ConditionBViolated(AWRI)";
    case ConstructionStatus::condition_b_cross: return "ConditionBViolated(cross_equation)";
  }
  return "unknown";
}

std::string_view to_string(OpenProblem p) {
  switch (p) {
    case OpenProblem::a: return "a";
    case OpenProblem::b: return "b";
    case OpenProblem::divisibility: return "divisibility";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

Construction from_sections(const SectionSpec& spec, std::size_t max_arity, const SearchConfig& cfg) {
  if (!spec.phi1 || (max_arity > 1 && !spec.phi)) throw Error(ErrorCode::invalid_argument, "section spec is incomplete");
  if (max_arity == 0) throw Error(ErrorCode::invalid_argument, "max_arity must be positive");
  Construction c;
  const DomainDesc& X = spec.domain;
  const Tolerance tol = cfg.tol;
  const std::vector<Atom> alpha = probe_alphabet(X, cfg);

  for (const Atom& u : alpha) {
    const Atom once = spec.phi1(u), twice = spec.phi1(once);
    if (!approx_equal(once, twice, tol)) {
      c.status = ConstructionStatus::phi1_not_retraction;
      c.arity = 1;
      c.witness = pair_witness({}, Str{u}, {}, CoValue(twice), CoValue(once), "phi_1(phi_1(x)) differs from phi_1(x)");
      c.detail = "phi_1 is not a retraction";
      return c;
    }
  }

  const SectionSpec s = spec;
  Evaluator rec;
  auto holder = std::make_shared<Evaluator>();
  *holder = [s, weak = std::weak_ptr<Evaluator>(holder)](std::span<const Atom> x) -> CoValue {
    if (x.size() == 1) return CoValue(s.phi1(x.front()));
    auto self = weak.lock();
    const std::size_t m = x.size();
    if (s.side(m) == SectionSide::r) {
      return CoValue(s.phi(m, (*self)(x.first(m - 1)).value(), x.back()));
    }
    return CoValue(s.phi(m, x.front(), (*self)(x.subspan(1)).value()));
  };
  // the closure keeps the shared evaluator alive through `holder`
  rec = [holder](std::span<const Atom> x) { return (*holder)(x); };
  VarFn G = VarFn::closed_form(spec.name, nlohmann::json::object(), X, X, rec, max_arity).with_epsilon_standard_claim(true);
  if (X.is_finite()) G = tabulate(G, X.elements(), max_arity);
  c.function = G;

  const std::size_t rand = per_length_samples(cfg, max_arity);
  for (std::size_t k = 1; k < max_arity; ++k) {
    const std::size_t m = k + 1;
    const SectionSide side = spec.side(m);
    auto diag_k = [&](const Atom& x) { return k == 1 ? spec.phi1(x) : spec.phi(k, x, x); };

    for (const Atom& x : alpha) {
      for (const Atom& y : alpha) {
        const Atom lhs = spec.phi(m, x, y);
        const Atom rhs = side == SectionSide::r ? spec.phi(m, diag_k(x), y) : spec.phi(m, x, diag_k(y));
        if (!approx_equal(lhs, rhs, tol)) {
          c.status = ConstructionStatus::condition_a_violated;
          c.arity = m;
          c.witness = pair_witness(Str{x}, Str{y}, {}, CoValue(lhs), CoValue(rhs),
                                   "phi_" + std::to_string(m) + " does not absorb the diagonal of phi_" +
                                       std::to_string(k));
          c.detail = "condition (a) fails at k = " + std::to_string(k);
          return c;
        }
      }
    }

    auto awri = first_violation(X, m, cfg, rand, [&](const Str& x) -> std::optional<Witness> {
      const CoValue v = G(x);
      auto t = substitute(X, {}, v, m, {});
      std::optional<CoValue> back;
      if (t) back = G(*t);
      if (back && approx_equal(*back, v, tol)) return std::nullopt;
      return pair_witness({}, x, {}, v, back, "G(G(y)^n) differs from G(y)");
    });
    if (awri) {
      c.status = ConstructionStatus::condition_b_awri;
      c.arity = m;
      c.witness = awri;
      c.detail = "G_" + std::to_string(m) + " is not range-idempotent";
      return c;
    }

    auto cross = first_violation(X, m, cfg, rand, [&](const Str& s) -> std::optional<Witness> {
      const std::span<const Atom> sp(s);
      const CoValue lhs = G(sp);
      std::optional<Str> t;
      if (side == SectionSide::r) {
        t = substitute(X, sp.first(1), G(sp.subspan(1)), k, {});
      } else {
        t = substitute(X, {}, G(sp.first(k)), k, sp.last(1));
      }
      std::optional<CoValue> rhs;
      if (t && t->size() == m) rhs = G(*t);
      if (rhs && approx_equal(lhs, *rhs, tol)) return std::nullopt;
      return pair_witness(Str{s.front()}, Str(s.begin() + 1, s.end() - 1), Str{s.back()}, lhs, rhs,
                          side == SectionSide::r ? "G(x y z) differs from G(x G_k(y z)^k)"
                                                 : "G(x y z) differs from G(G_k(x y)^k z)");
    });
    if (cross) {
      c.status = ConstructionStatus::condition_b_cross;
      c.arity = m;
      c.witness = cross;
      c.detail = "cross equation fails at k = " + std::to_string(k);
      return c;
    }
  }
  c.detail = "conditions hold up to arity " + std::to_string(max_arity);
  return c;
}

SectionSpec section_spec_of(const VarFn& f, std::function<SectionSide(std::size_t)> side) {
  SectionSpec s;
  s.domain = f.domain();
  s.name = f.name() + "_sections";
  if (side) s.side = std::move(side);
  s.phi1 = [f](const Atom& x) { return f(Str{x}).value(); };
  auto sd = s.side;
  s.phi = [f, sd](std::size_t k, const Atom& x, const Atom& y) {
    const DiagonalSections ds = sections(f, k);
    return (sd(k) == SectionSide::r ? ds.delta_r(x, y) : ds.delta_l(x, y)).value();
  };
  return s;
}

SectionSpec mz_section_spec(double z) {
  SectionSpec s;
  s.domain = DomainDesc::reals();
  s.name = "mz_sections";
  s.phi1 = [](const Atom& x) { return x; };
  s.phi = [z](std::size_t k, const Atom& x, const Atom& y) -> Atom {
    const SectionCoeffs c = mz_section_coeffs(z, k - 1);
    return c.a * std::get<double>(x) + c.b * std::get<double>(y);
  };
  return s;
}

// ---------------------------------------------------------------------------

VarFn extended_function(const VarFn& f, std::size_t k, const Evaluator& candidate) {
  return VarFn::closed_form(
             f.name() + "_extended", nlohmann::json{{"base", f.name()}, {"k", k}}, f.domain(), f.codomain(),
             [f, k, candidate](std::span<const Atom> x) { return x.size() <= k ? f(x) : candidate(x); }, k + 1,
             f.default_value())
      .with_epsilon_standard_claim(f.claims_epsilon_standard());
}

ExtensionVerdict extend(const VarFn& f, std::size_t k, const Evaluator& candidate, const SearchConfig& cfg) {
  ExtensionVerdict v;
  if (k == 0) throw Error(ErrorCode::invalid_argument, "extension starts from arity 1");
  PropertyReport base = check(f, PropertyId::b_associative, bounded(cfg, k));
  if (!base.passed()) {
    v.status = Status::unsupported;
    v.note = "precondition unmet: F is not B-associative up to arity " + std::to_string(k);
    return v;
  }
  const DomainDesc& X = f.domain();
  const Tolerance tol = cfg.tol;
  const std::size_t m = k + 1;
  auto cand = [&](std::span<const Atom> x) -> std::optional<CoValue> {
    if (x.size() != m) return std::nullopt;
    return candidate(x);
  };
  std::string failed;
  auto w = first_violation(X, m, cfg, per_length_samples(cfg, 1), [&](const Str& s) -> std::optional<Witness> {
    const std::span<const Atom> sp(s);
    const CoValue lhs = candidate(sp);
    auto t = substitute(X, {}, lhs, m, {});
    std::optional<CoValue> rhs = t ? cand(*t) : std::nullopt;
    if (!rhs || !approx_equal(lhs, *rhs, tol)) {
      failed = "diagonal";
      return pair_witness({}, s, {}, lhs, rhs, "F_{k+1}(F_{k+1}(y)^{k+1}) differs from F_{k+1}(y)");
    }
    t = substitute(X, sp.first(1), f(sp.subspan(1)), k, {});
    rhs = t ? cand(*t) : std::nullopt;
    if (!rhs || !approx_equal(lhs, *rhs, tol)) {
      failed = "right_absorption";
      return pair_witness(Str{s.front()}, Str(s.begin() + 1, s.end() - 1), Str{s.back()}, lhs, rhs,
                          "F_{k+1}(x y z) differs from F_{k+1}(x F_k(y z)^k)");
    }
    t = substitute(X, {}, f(sp.first(k)), k, sp.last(1));
    rhs = t ? cand(*t) : std::nullopt;
    if (!rhs || !approx_equal(lhs, *rhs, tol)) {
      failed = "left_absorption";
      return pair_witness(Str{s.front()}, Str(s.begin() + 1, s.end() - 1), Str{s.back()}, lhs, rhs,
                          "F_{k+1}(x y z) differs from F_{k+1}(F_k(x y)^k z)");
    }
    return std::nullopt;
  });
  if (w) {
    v.status = Status::fail;
    v.witness = std::move(w);
    v.failed_equation = failed;
    return v;
  }
  v.status = Status::pass;
  PropertyReport cross = check(extended_function(f, k, candidate), PropertyId::b_associative, bounded(cfg, m));
  if (!cross.passed() && cross.status != Status::unsupported) {
    cross.critical = true;
    v.note = "candidate solves the extension equations but the extension is not B-associative";
  }
  v.cross_check = std::move(cross);
  return v;
}

ConstantTailResult constant_tail(const ConstantTail& t, const SearchConfig& cfg) {
  if (!t.constants) throw Error(ErrorCode::invalid_argument, "constant tail needs its constants");
  const VarFn base = t.base;
  const std::size_t n = t.cutoff;
  const auto consts = t.constants;
  const DomainDesc X = base.domain();
  VarFn g = VarFn::closed_form(
                base.name() + "_constant_tail", nlohmann::json{{"base", base.name()}, {"cutoff", n}}, X, X,
                [base, n, consts, X](std::span<const Atom> x) -> CoValue {
                  if (x.size() <= n) return base(x);
                  Atom c = consts(x.size());
                  if (!X.contains(c)) throw Error(ErrorCode::domain_mismatch, "tail constant outside the domain");
                  if (X.is_finite()) c = X.elements()[*X.index_of(c)];
                  return c;
                },
                base.max_arity(), base.default_value())
                .with_epsilon_standard_claim(base.claims_epsilon_standard());
  ConstantTailResult r{g, check(base, PropertyId::b_associative, cfg), std::nullopt};
  if (!r.precondition.passed()) {
    r.precondition.note = "precondition unmet: base is not B-associative" +
                          (r.precondition.note.empty() ? std::string() : "; " + r.precondition.note);
    return r;
  }
  r.cross_check = check(g, PropertyId::b_associative, cfg);
  if (r.cross_check->failed()) r.cross_check->critical = true;
  return r;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

class Enumerator {
 public:
  Enumerator(std::size_t d, std::size_t max_arity, std::uint64_t budget) : d_(d), max_(max_arity), budget_(budget) {
    pow_.push_back(1);
    for (std::size_t i = 0; i <= max_; ++i) pow_.push_back(pow_.back() * d_);
  }

  /// Calls emit(levels) for every solution; levels[m - 1] is F_m over X^m in lexicographic order.
  template <class Emit>
  void run(Emit&& emit) {
    std::vector<std::vector<std::size_t>> levels;
    level(levels, 1, emit);
  }

 private:
  template <class Emit>
  void level(std::vector<std::vector<std::size_t>>& levels, std::size_t m, Emit& emit) {
    if (m > max_) {
      emit(levels);
      return;
    }
    const std::size_t size = pow_[m];
    UnionFind uf(size);
    if (m >= 2) {
      const std::size_t k = m - 1;
      const auto& prev = levels[k - 1];
      std::vector<std::size_t> dig(m);
      for (std::size_t w = 0; w < size; ++w) {
        digits(w, m, dig);
        // F_m(x y z) = F_m(x F_k(y z)^k)
        const std::size_t right = prev[code(dig.begin() + 1, dig.end())];
        uf.unite(w, dig[0] * pow_[k] + repeat(right, k));
        // F_m(x y z) = F_m(F_k(x y)^k z)
        const std::size_t left = prev[code(dig.begin(), dig.end() - 1)];
        uf.unite(w, repeat(left, k) * d_ + dig[m - 1]);
      }
    }
    std::vector<std::size_t> classes;
    for (std::size_t w = 0; w < size; ++w) {
      if (uf.find(w) == w) classes.push_back(w);
    }
    std::vector<std::optional<std::size_t>> value(size);
    std::vector<std::size_t> table(size);
    assign(levels, m, uf, classes, 0, value, table, emit);
  }

  template <class Emit>
  void assign(std::vector<std::vector<std::size_t>>& levels, std::size_t m, UnionFind& uf,
              const std::vector<std::size_t>& classes, std::size_t next, std::vector<std::optional<std::size_t>>& value,
              std::vector<std::size_t>& table, Emit& emit) {
    while (next < classes.size() && value[classes[next]]) ++next;
    if (next == classes.size()) {
      for (std::size_t w = 0; w < table.size(); ++w) table[w] = *value[uf.find(w)];
      levels.push_back(table);
      level(levels, m + 1, emit);
      levels.pop_back();
      return;
    }
    const std::size_t c = classes[next];
    for (std::size_t v = 0; v < d_; ++v) {
      if (++nodes_ > budget_) throw Error(ErrorCode::budget_exceeded, "enumeration exceeded its node budget");
      // delta_m(F_m(w)) = F_m(w): the class of v^m must also take the value v
      const std::size_t diag = uf.find(repeat(v, m));
      if (diag != c && value[diag] && *value[diag] != v) continue;
      const bool set_diag = diag != c && !value[diag];
      value[c] = v;
      if (set_diag) value[diag] = v;
      assign(levels, m, uf, classes, next + 1, value, table, emit);
      value[c].reset();
      if (set_diag) value[diag].reset();
    }
  }

  void digits(std::size_t w, std::size_t m, std::vector<std::size_t>& out) const {
    for (std::size_t i = m; i-- > 0;) {
      out[i] = w % d_;
      w /= d_;
    }
  }
  template <class It>
  std::size_t code(It b, It e) const {
    std::size_t c = 0;
    for (; b != e; ++b) c = c * d_ + *b;
    return c;
  }
  std::size_t repeat(std::size_t v, std::size_t n) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i) c = c * d_ + v;
    return c;
  }

  std::size_t d_;
  std::size_t max_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<std::size_t> pow_;
};

bool idempotent_at(const VarFn& f, std::size_t n) {
  for (const Atom& x : f.domain().elements()) {
    if (!approx_equal(f(Str(n, x)), CoValue(x))) return false;
  }
  return true;
}

std::string table_summary(const VarFn& f) {
  std::string out;
  const auto& e = f.table_entries();
  StringSpace sp(f.domain().elements(), *f.max_arity());
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (i > 1) out += sp.length_of(i) != sp.length_of(i - 1) ? " | " : " ";
    out += to_string(e[i]);
  }
  return out;
}

}  // namespace

Enumeration enumerate_b_associative(const DomainDesc& domain, std::size_t max_arity, EnumerationFilter filter,
                                    const SearchConfig& cfg) {
  if (!domain.is_finite()) throw Error(ErrorCode::unsupported, "enumeration needs a finite domain");
  const std::size_t d = domain.elements().size();
  if (d > 3 || max_arity == 0 || max_arity > 3) {
    throw Error(ErrorCode::invalid_argument, "enumeration is limited to |X| <= 3 and 1 <= max_arity <= 3");
  }
  Enumeration out;
  Census& c = out.census;
  c.domain_size = d;
  c.max_arity = max_arity;
  std::uint64_t cells = 0, p = 1;
  for (std::size_t n = 1; n <= max_arity; ++n) cells += (p *= d);
  c.total = 1;
  for (std::uint64_t i = 0; i < cells; ++i) c.total *= d;

  const SearchConfig bound = bounded(cfg, max_arity);
  Enumerator e(d, max_arity, cfg.budget);
  e.run([&](const std::vector<std::vector<std::size_t>>& levels) {
    std::vector<CoValue> entries{CoValue::epsilon()};
    for (const auto& lv : levels) {
      for (std::size_t v : lv) entries.emplace_back(domain.elements()[v]);
    }
    VarFn f = VarFn::tabulated(domain, domain, max_arity, std::move(entries),
                               "b_assoc_" + std::to_string(c.b_associative))
                  .with_epsilon_standard_claim(true);
    ++c.b_associative;
    const bool assoc = check(f, PropertyId::associative, bound).passed();
    bool idem = true;
    for (std::size_t n = 1; n <= max_arity && idem; ++n) idem = idempotent_at(f, n);
    c.associative += assoc;
    c.idempotent += idem;
    if ((filter.associative && !assoc) || (filter.idempotent && !idem)) return;
    if (c.examples.size() < 5) c.examples.push_back(f.name() + ": " + table_summary(f));
    out.operations.push_back(std::move(f));
  });
  return out;
}

ProbeReport probe_open_problems(OpenProblem problem, const DomainDesc& domain, std::size_t max_arity,
                                const SearchConfig& cfg) {
  ProbeReport r;
  r.problem = problem;
  r.max_arity = max_arity;
  const Enumeration all = enumerate_b_associative(domain, max_arity, {}, cfg);
  r.domain_size = all.census.domain_size;
  const std::string bound = "|X| = " + std::to_string(r.domain_size) + ", arities <= " + std::to_string(max_arity) +
                            ", " + std::to_string(all.operations.size()) +
                            " B-associative epsilon-standard operations";

  auto idempotent_n = [](const VarFn& f, std::size_t n) { return idempotent_at(f, n); };
  switch (problem) {
    case OpenProblem::a: {
      std::vector<const VarFn*> idem;
      for (const VarFn& g : all.operations) {
        bool ok = true;
        for (std::size_t n = 1; n <= max_arity && ok; ++n) ok = idempotent_n(g, n);
        if (ok) idem.push_back(&g);
      }
      StringSpace sp(domain.elements(), max_arity);
      for (const VarFn& f : all.operations) {
        ++r.examined;
        const bool found = std::any_of(idem.begin(), idem.end(), [&](const VarFn* g) {
          for (std::size_t i = 1; i < sp.size(); ++i) {
            const Str x = sp.at(i);
            if (!approx_equal(f(x), f(Str(x.size(), (*g)(x).value())))) return false;
          }
          return true;
        });
        if (!found) {
          r.counterexample = f;
          r.detail = "no idempotent B-associative G with F_n = delta_{F_n} o G_n for " + f.name() + ": " +
                     table_summary(f);
          break;
        }
      }
      break;
    }
    case OpenProblem::b:
      for (const VarFn& f : all.operations) {
        ++r.examined;
        for (std::size_t k = 1; k < max_arity && !r.counterexample; ++k) {
          if (idempotent_n(f, k + 1) && !idempotent_n(f, k)) {
            r.counterexample = f;
            r.detail = f.name() + " has F_" + std::to_string(k + 1) + " idempotent but F_" + std::to_string(k) +
                       " not: " + table_summary(f);
          }
        }
        if (r.counterexample) break;
      }
      break;
    case OpenProblem::divisibility:
      for (const VarFn& f : all.operations) {
        ++r.examined;
        for (std::size_t k = 1; k <= max_arity && !r.counterexample; ++k) {
          for (std::size_t n = 2; k * n <= max_arity; ++n) {
            if (idempotent_n(f, k * n) && !idempotent_n(f, k)) {
              r.counterexample = f;
              r.critical = true;
              r.detail = f.name() + " has F_" + std::to_string(k * n) + " idempotent but F_" + std::to_string(k) +
                         " not";
              break;
            }
          }
        }
        if (r.counterexample) break;
      }
      break;
  }
  r.outcome = r.counterexample ? "counterexample found (" + bound + ")"
                               : "no counterexample at this bound (" + bound + "); this is not a proof";
  return r;
}

// ---------------------------------------------------------------------------

nlohmann::json census_to_json(const Census& c) {
  return nlohmann::json{{"domain_size", c.domain_size}, {"max_arity", c.max_arity},   {"total", c.total},
                        {"b_associative", c.b_associative}, {"associative", c.associative},
                        {"idempotent", c.idempotent},     {"examples", c.examples}};
}

nlohmann::json probe_to_json(const ProbeReport& p) {
  nlohmann::json j{{"problem", std::string(to_string(p.problem))},
                   {"domain_size", p.domain_size},
                   {"max_arity", p.max_arity},
                   {"examined", p.examined},
                   {"outcome", p.outcome}};
  j["counterexample"] = p.counterexample ? table_to_json(*p.counterexample) : nlohmann::json(nullptr);
  if (!p.detail.empty()) j["detail"] = p.detail;
  if (p.critical) j["critical"] = true;
  return j;
}

nlohmann::json construction_to_json(const Construction& c) {
  nlohmann::json j{{"status", std::string(to_string(c.status))}, {"detail", c.detail}};
  if (!c.ok()) j["arity"] = c.arity;
  j["witness"] = c.witness ? witness_to_json(*c.witness) : nlohmann::json(nullptr);
  return j;
}

}  // namespace barylab
