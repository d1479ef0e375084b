#include "barylab/properties.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>

namespace barylab {

namespace {

constexpr std::array<std::pair<PropertyId, std::string_view>, 17> kPropertyNames{{
    {PropertyId::epsilon_standard, "epsilon_standard"},
    {PropertyId::b_associative, "b_associative"},
    {PropertyId::b_assoc_simplified, "b_assoc_simplified"},
    {PropertyId::b_assoc_form_ii, "b_assoc_form_ii"},
    {PropertyId::b_assoc_form_iii, "b_assoc_form_iii"},
    {PropertyId::b_assoc_form_iv, "b_assoc_form_iv"},
    {PropertyId::b_preassociative, "b_preassociative"},
    {PropertyId::b_preassoc_two_eq, "b_preassoc_two_eq"},
    {PropertyId::b_preassoc_simplified, "b_preassoc_simplified"},
    {PropertyId::associative, "associative"},
    {PropertyId::preassociative, "preassociative"},
    {PropertyId::idempotent, "idempotent"},
    {PropertyId::arity_wise_range_idempotent, "arity_wise_range_idempotent"},
    {PropertyId::arity_wise_quasi_range_idempotent, "arity_wise_quasi_range_idempotent"},
    {PropertyId::symmetric, "symmetric"},
    {PropertyId::strictly_increasing, "strictly_increasing"},
    {PropertyId::continuous_sampled, "continuous_sampled"},
}};

bool takes_arity(PropertyId id) {
  return id == PropertyId::symmetric || id == PropertyId::strictly_increasing ||
         id == PropertyId::continuous_sampled;
}

}  // namespace

std::string to_string(Property p) {
  for (const auto& [id, name] : kPropertyNames) {
    if (id == p.id) return takes_arity(id) ? std::string(name) + "(" + std::to_string(p.arity) + ")" : std::string(name);
  }
  return "unknown";
}

std::optional<Property> parse_property(std::string_view text) {
  std::size_t arity = 0;
  std::string_view head = text;
  if (auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') return std::nullopt;
    std::string_view digits = text.substr(open + 1, text.size() - open - 2);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), arity);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || arity == 0) return std::nullopt;
    head = text.substr(0, open);
  }
  for (const auto& [id, name] : kPropertyNames) {
    if (name != head) continue;
    if (takes_arity(id) != (arity != 0)) return std::nullopt;
    return Property{id, arity};
  }
  return std::nullopt;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::unsupported: return "unsupported";
  }
  return "unsupported";
}

std::string_view to_string(SearchMode m) { return m == SearchMode::exhaustive ? "exhaustive" : "sampled"; }

std::size_t effective_max_len(const VarFn& f, const SearchConfig& cfg) {
  std::size_t len = std::max<std::size_t>(cfg.max_len, 1);
  if (f.max_arity()) len = std::min(len, *f.max_arity());
  return len;
}

namespace {

using Clock = std::chrono::steady_clock;
using Span = std::span<const Atom>;

bool append_power(const DomainDesc& d, Str& out, const CoValue& v, std::size_t n) {
  if (n == 0 || v.is_epsilon()) return true;
  if (!d.contains(v.value())) return false;
  if (d.is_finite()) {
    out.insert(out.end(), n, d.elements()[*d.index_of(v.value())]);
  } else {
    out.insert(out.end(), n, v.value());
  }
  return true;
}

void append(Str& out, Span s) { out.insert(out.end(), s.begin(), s.end()); }

bool is_real(const CoValue& v) { return !v.is_epsilon() && std::holds_alternative<double>(v.value()); }

Witness make_witness(Span x, Span y, Span z, std::optional<CoValue> lhs, std::optional<CoValue> rhs) {
  Witness w;
  w.x.assign(x.begin(), x.end());
  w.y.assign(y.begin(), y.end());
  w.z.assign(z.begin(), z.end());
  w.lhs = std::move(lhs);
  w.rhs = std::move(rhs);
  return w;
}

/// Strings grouped by (approximately) equal value, for collision lookups.
class ValueIndex {
 public:
  void add(const CoValue& v, std::size_t index) {
    if (v.is_epsilon()) {
      eps_.push_back(index);
    } else if (const auto* s = std::get_if<std::string>(&v.value())) {
      labels_[*s].push_back(index);
    } else {
      keyed_.emplace_back(key(v.value()), index);
    }
  }

  void finalize() { std::sort(keyed_.begin(), keyed_.end()); }

  /// Indices (ascending) whose value equals v within tolerance.
  void equal_to(const CoValue& v, const std::vector<CoValue>& values, Tolerance tol,
                std::vector<std::size_t>& out) const {
    out.clear();
    if (v.is_epsilon()) {
      out = eps_;
      return;
    }
    if (const auto* s = std::get_if<std::string>(&v.value())) {
      if (auto it = labels_.find(*s); it != labels_.end()) out = it->second;
      return;
    }
    const double k = key(v.value());
    const double w = 2.0 * std::max(tol.abs, tol.rel * std::abs(k)) + tol.abs;
    auto lo = std::lower_bound(keyed_.begin(), keyed_.end(), std::pair{k - w, std::size_t{0}});
    for (auto it = lo; it != keyed_.end() && it->first <= k + w; ++it) {
      if (approx_equal(values[it->second], v, tol)) out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
  }

 private:
  static double key(const Atom& a) {
    if (const auto* d = std::get_if<double>(&a)) return *d;
    const auto& p = std::get<Point>(a);
    return p.empty() ? 0.0 : p.front();
  }

  std::vector<std::size_t> eps_;
  std::map<std::string, std::vector<std::size_t>> labels_;
  std::vector<std::pair<double, std::size_t>> keyed_;
};

/// Shared state of one property check: the grid space with cached values and
/// the evaluation budget.
class Engine {
 public:
  Engine(const VarFn& f, const SearchConfig& cfg)
      : f_(f),
        cfg_(cfg),
        max_len_(effective_max_len(f, cfg)),
        finite_(f.domain().is_finite()),
        budget_(cfg.budget),
        space_(core_alphabet(f.domain()), finite_ ? max_len_ : std::min(max_len_, cfg.grid_len)) {
    if (!finite_) samples_alphabet_ = sample_alphabet(f.domain(), cfg);
  }

  const VarFn& f() const { return f_; }
  const SearchConfig& cfg() const { return cfg_; }
  const DomainDesc& domain() const { return f_.domain(); }
  std::size_t max_len() const { return max_len_; }
  bool finite() const { return finite_; }
  const StringSpace& space() const { return space_; }
  const std::vector<CoValue>& values() const { return values_; }
  EvalBudget& budget() { return budget_; }

  void tabulate() {
    if (!values_.empty()) return;
    budget_.spend(space_.size());
    values_.resize(space_.size());
    values_[0] = f_.default_value();
    for (std::size_t i = 1; i < space_.size(); ++i) values_[i] = f_(space_.at(i));
  }

  void build_indexes() {
    if (!by_length_.empty()) return;
    tabulate();
    by_length_.resize(space_.max_len() + 1);
    for (std::size_t i = 0; i < space_.size(); ++i) {
      by_length_[space_.length_of(i)].add(values_[i], i);
      all_.add(values_[i], i);
    }
    for (auto& ix : by_length_) ix.finalize();
    all_.finalize();
  }

  const ValueIndex& by_length(std::size_t len) const { return by_length_.at(len); }
  const ValueIndex& all() const { return all_; }

  CoValue F(Span s) {
    if (!values_.empty() && s.size() <= space_.max_len()) {
      if (auto idx = space_.index_of(s)) return values_[*idx];
    }
    budget_.spend();
    return f_(s);
  }

  /// F of x v^n z, or nullopt when v is outside the domain.
  std::optional<CoValue> F_subst(Span x, const CoValue& v, std::size_t n, Span z) {
    auto t = substitute(domain(), x, v, n, z);
    if (!t) return std::nullopt;
    return F(*t);
  }

  bool same(const CoValue& a, const CoValue& b) const { return approx_equal(a, b, cfg_.tol); }
  bool same(const std::optional<CoValue>& a, const std::optional<CoValue>& b) const {
    return a && b && same(*a, *b);
  }

  Atom random_atom(std::mt19937_64& rng) const {
    if (finite_) return space_.alphabet()[uniform_index(rng, space_.alphabet().size())];
    if (uniform_index(rng, 2) == 0) return samples_alphabet_[uniform_index(rng, samples_alphabet_.size())];
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (domain().kind() == DomainDesc::Kind::vector_space) {
      Point p(domain().dimension());
      for (double& c : p) c = -4.0 + 8.0 * unit(rng);
      return p;
    }
    auto [lo, hi] = sample_window(domain().interval());
    const double v = lo + (hi - lo) * unit(rng);
    if (domain().contains(Atom{v})) return v;
    return samples_alphabet_[uniform_index(rng, samples_alphabet_.size())];
  }

  Str random_string(std::mt19937_64& rng, std::size_t len) const {
    Str s;
    s.reserve(len);
    for (std::size_t i = 0; i < len; ++i) s.push_back(random_atom(rng));
    return s;
  }

 private:
  const VarFn& f_;
  SearchConfig cfg_;
  std::size_t max_len_;
  bool finite_;
  EvalBudget budget_;
  StringSpace space_;
  std::vector<Atom> samples_alphabet_;
  std::vector<CoValue> values_;
  std::vector<ValueIndex> by_length_;
  ValueIndex all_;
};

struct Plan {
  std::string name;
  std::size_t min_len = 1;
  std::size_t max_len = 1;
  bool needs_indexes = false;
  /// Examines a grid string (by index in the space).
  std::function<std::optional<Witness>(std::size_t index, const Str& s)> grid;
  /// Examines a random instance (numeric domains only).
  std::function<std::optional<Witness>(const Str& s, std::mt19937_64& rng)> sampled;
};

SearchSpace describe_space(const Engine& e) {
  SearchSpace sp;
  sp.mode = e.finite() ? SearchMode::exhaustive : SearchMode::sampled;
  sp.max_len = e.max_len();
  sp.alphabet_size = e.space().alphabet().size();
  sp.samples = e.finite() ? 0 : e.cfg().samples;
  sp.seed = e.cfg().seed;
  return sp;
}

PropertyReport unsupported_report(const Engine& e, std::string name, std::string note) {
  PropertyReport r;
  r.property = std::move(name);
  r.status = Status::unsupported;
  r.space = describe_space(e);
  r.note = std::move(note);
  return r;
}

PropertyReport execute(Engine& e, const Plan& plan) {
  const auto start = Clock::now();
  PropertyReport r;
  r.property = plan.name;
  r.space = describe_space(e);
  try {
    if (plan.needs_indexes) {
      e.build_indexes();
    } else {
      e.tabulate();
    }
    const StringSpace& sp = e.space();
    std::uint64_t visited = 0;
    if (plan.min_len <= sp.max_len() && plan.min_len <= plan.max_len) {
      const std::size_t begin = sp.offset(plan.min_len);
      const std::size_t end = sp.offset(std::min(plan.max_len, sp.max_len()) + 1);
      auto hit = first_hit<Witness>(begin, end, e.cfg().jobs,
                                    [&](std::size_t i) { return plan.grid(i, sp.at(i)); });
      if (hit) {
        r.status = Status::fail;
        r.witness = std::move(hit->second);
        visited += hit->first - begin + 1;
      } else {
        visited += end - begin;
      }
    }
    if (!r.witness && !e.finite() && plan.sampled && plan.min_len <= plan.max_len) {
      const std::size_t span = plan.max_len - plan.min_len + 1;
      auto hit = first_hit<Witness>(0, e.cfg().samples, e.cfg().jobs, [&](std::size_t k) {
        auto rng = instance_rng(e.cfg().seed, k);
        const std::size_t len = plan.min_len + uniform_index(rng, span);
        Str s = e.random_string(rng, len);
        return plan.sampled(s, rng);
      });
      if (hit) {
        r.status = Status::fail;
        r.witness = std::move(hit->second);
        r.note = "violation found at random instance " + std::to_string(hit->first);
        visited += hit->first + 1;
      } else {
        visited += e.cfg().samples;
      }
    }
    r.space.instances = visited;
  } catch (const BudgetExhausted&) {
    r.status = Status::unsupported;
    r.budget_exceeded = true;
    r.witness.reset();
    r.note = "budget exceeded after " + std::to_string(e.cfg().budget) + " evaluations";
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return r;
}

Plan simple_plan(std::string name, std::size_t min_len, std::size_t max_len,
                 std::function<std::optional<Witness>(const Str&)> root) {
  Plan p;
  p.name = std::move(name);
  p.min_len = min_len;
  p.max_len = max_len;
  p.grid = [root](std::size_t, const Str& s) { return root(s); };
  p.sampled = [root](const Str& s, std::mt19937_64&) { return root(s); };
  return p;
}

// ---------------------------------------------------------------------------
// Roots shared by the grid sweep and random instances.

std::optional<Witness> root_b_assoc(Engine& e, const Str& s, bool simplified) {
  const Span sp(s);
  const std::size_t n = s.size();
  const CoValue lhs = e.F(sp);
  for (std::size_t xl = 0; xl <= n; ++xl) {
    for (std::size_t yl = 1; xl + yl <= n; ++yl) {
      const std::size_t zl = n - xl - yl;
      if (simplified && xl + zl > 1) continue;
      const Span x = sp.subspan(0, xl), y = sp.subspan(xl, yl), z = sp.subspan(xl + yl);
      auto rhs = e.F_subst(x, e.F(y), yl, z);
      if (!e.same(lhs, rhs)) return make_witness(x, y, z, lhs, rhs);
    }
  }
  return std::nullopt;
}

std::optional<Witness> root_form_ii(Engine& e, const Str& s) {
  const Span sp(s);
  const std::size_t n = s.size();
  struct Split {
    std::size_t xl, yl;
    std::optional<CoValue> v;
  };
  std::vector<Split> splits{{0, 0, e.F(sp)}};
  for (std::size_t xl = 0; xl <= n; ++xl) {
    for (std::size_t yl = 1; xl + yl <= n; ++yl) {
      splits.push_back({xl, yl, e.F_subst(sp.subspan(0, xl), e.F(sp.subspan(xl, yl)), yl, sp.subspan(xl + yl))});
    }
  }
  for (std::size_t i = 0; i < splits.size(); ++i) {
    for (std::size_t j = i + 1; j < splits.size(); ++j) {
      if (e.same(splits[i].v, splits[j].v)) continue;
      const auto& a = splits[i];
      const auto& b = splits[j];
      Witness w = make_witness(sp.subspan(0, a.xl), sp.subspan(a.xl, a.yl), sp.subspan(a.xl + a.yl), a.v, b.v);
      w.x_prime = Str(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(b.xl));
      w.y_prime.assign(s.begin() + static_cast<std::ptrdiff_t>(b.xl),
                       s.begin() + static_cast<std::ptrdiff_t>(b.xl + b.yl));
      w.z_prime = Str(s.begin() + static_cast<std::ptrdiff_t>(b.xl + b.yl), s.end());
      return w;
    }
  }
  return std::nullopt;
}

std::optional<CoValue> form_iii_lhs(Engine& e, Span x, Span y, Span z) {
  Str xy = concat(x, y);
  return e.F_subst({}, e.F(xy), xy.size(), z);
}

std::optional<CoValue> form_iii_rhs(Engine& e, Span x, Span y, Span z) {
  Str yz = concat(y, z);
  return e.F_subst(x, e.F(yz), yz.size(), {});
}

std::optional<Witness> root_form_iii(Engine& e, const Str& s) {
  const Span sp(s);
  const std::size_t n = s.size();
  for (std::size_t xl = 0; xl <= n; ++xl) {
    for (std::size_t yl = 0; xl + yl <= n; ++yl) {
      const Span x = sp.subspan(0, xl), y = sp.subspan(xl, yl), z = sp.subspan(xl + yl);
      auto lhs = form_iii_lhs(e, x, y, z);
      auto rhs = form_iii_rhs(e, x, y, z);
      if (!e.same(lhs, rhs)) return make_witness(x, y, z, lhs, rhs);
    }
  }
  return std::nullopt;
}

std::optional<CoValue> form_iv_rhs(Engine& e, Span x, Span y) {
  Str t;
  if (!append_power(e.domain(), t, e.F(x), x.size())) return std::nullopt;
  if (!append_power(e.domain(), t, e.F(y), y.size())) return std::nullopt;
  return e.F(t);
}

std::optional<Witness> root_form_iv(Engine& e, const Str& s) {
  const Span sp(s);
  const CoValue lhs = e.F(sp);
  for (std::size_t xl = 0; xl <= s.size(); ++xl) {
    const Span x = sp.subspan(0, xl), y = sp.subspan(xl);
    auto rhs = form_iv_rhs(e, x, y);
    if (!e.same(lhs, rhs)) return make_witness(x, y, {}, lhs, rhs);
  }
  return std::nullopt;
}

std::optional<Witness> root_associative(Engine& e, const Str& s) {
  const Span sp(s);
  const std::size_t n = s.size();
  const CoValue lhs = e.F(sp);
  for (std::size_t xl = 0; xl <= n; ++xl) {
    for (std::size_t yl = 0; xl + yl <= n; ++yl) {
      const Span x = sp.subspan(0, xl), y = sp.subspan(xl, yl), z = sp.subspan(xl + yl);
      const CoValue fy = e.F(y);
      if (n - yl + (fy.is_epsilon() ? 0 : 1) > e.max_len()) continue;
      auto rhs = e.F_subst(x, fy, 1, z);
      if (!e.same(lhs, rhs)) return make_witness(x, y, z, lhs, rhs);
    }
  }
  return std::nullopt;
}

std::optional<Witness> root_awri(Engine& e, const Str& s) {
  const CoValue lhs = e.F(s);
  auto rhs = e.F_subst({}, lhs, s.size(), {});
  if (!e.same(lhs, rhs)) return make_witness({}, s, {}, lhs, rhs);
  return std::nullopt;
}

std::optional<Witness> root_idempotent(Engine& e, const Str& s) {
  if (std::any_of(s.begin(), s.end(), [&](const Atom& a) { return !(a == s.front()); })) return std::nullopt;
  const CoValue lhs = e.F(s);
  if (!e.same(lhs, CoValue(s.front()))) return make_witness({}, s, {}, lhs, CoValue(s.front()));
  return std::nullopt;
}

std::optional<Witness> root_symmetric(Engine& e, const Str& s, std::size_t from, std::size_t to) {
  // Adjacent transpositions inside positions [from, to) generate every permutation there.
  const CoValue lhs = e.F(s);
  for (std::size_t i = from; i + 1 < to; ++i) {
    if (s[i] == s[i + 1]) continue;
    Str t = s;
    std::swap(t[i], t[i + 1]);
    const CoValue rhs = e.F(t);
    if (!e.same(lhs, rhs)) {
      Witness w = make_witness({}, s, {}, lhs, rhs);
      w.y_prime = std::move(t);
      return w;
    }
  }
  return std::nullopt;
}

std::optional<Witness> root_epsilon_standard(Engine& e, const Str& s) {
  const CoValue v = e.F(s);
  if (v.is_epsilon()) {
    Witness w = make_witness({}, s, {}, v, std::nullopt);
    w.note = "nonempty string mapped to epsilon";
    return w;
  }
  return std::nullopt;
}

/// Smallest alphabet value above x (grid mode) or a random step up (sampled mode).
std::optional<double> step_up(const Engine& e, double x, std::mt19937_64* rng) {
  if (rng) {
    std::uniform_real_distribution<double> d(0.05, 1.0);
    const double v = x + d(*rng);
    if (e.domain().contains(Atom{v})) return v;
    return std::nullopt;
  }
  std::optional<double> best;
  for (const Atom& a : e.space().alphabet()) {
    const double v = std::get<double>(a);
    if (v > x && (!best || v < *best)) best = v;
  }
  return best;
}

std::optional<Witness> root_increasing(Engine& e, const Str& s, std::mt19937_64* rng) {
  const CoValue lhs = e.F(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto up = step_up(e, std::get<double>(s[i]), rng);
    if (!up) continue;
    Str t = s;
    t[i] = *up;
    const CoValue rhs = e.F(t);
    if (!is_real(lhs) || !is_real(rhs) || !(rhs.real() > lhs.real())) {
      Witness w = make_witness({}, s, {}, lhs, rhs);
      w.y_prime = std::move(t);
      w.note = "raising coordinate " + std::to_string(i + 1) + " did not raise the value";
      return w;
    }
  }
  return std::nullopt;
}

std::optional<Witness> root_continuous(Engine& e, const Str& s) {
  const CoValue v0 = e.F(s);
  if (!is_real(v0)) {
    Witness w = make_witness({}, s, {}, v0, std::nullopt);
    w.note = "value is not a real number";
    return w;
  }
  const double scale = std::max(1.0, std::abs(v0.real()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double xi = std::get<double>(s[i]);
    for (const double h : {1e-7, -1e-7}) {
      if (!e.domain().contains(Atom{xi + h})) continue;
      Str t1 = s, t2 = s;
      t1[i] = xi + h;
      t2[i] = xi + h / 10.0;
      const CoValue v1 = e.F(t1), v2 = e.F(t2);
      const double j1 = is_real(v1) ? std::abs(v1.real() - v0.real()) : INFINITY;
      const double j2 = is_real(v2) ? std::abs(v2.real() - v0.real()) : INFINITY;
      if (j1 > 1e-3 * scale || j2 > 0.5 * j1 + 1e-9 * scale) {
        Witness w = make_witness({}, s, {}, v0, v1);
        w.y_prime = std::move(t1);
        w.note = "jump " + to_string(Atom{j1}) + " at step " + to_string(Atom{h}) + " on coordinate " +
                 std::to_string(i + 1);
        return w;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// B-preassociativity: grid roots use the value index, random roots use
// generated collision candidates.

enum class PreMode { full, simplified, plain };

std::optional<Witness> preassoc_grid(Engine& e, std::size_t idx, PreMode mode) {
  const StringSpace& sp = e.space();
  const auto& values = e.values();
  std::vector<std::size_t> c, yc, t;
  std::vector<std::size_t> group;
  sp.codes(idx, c);
  const std::size_t n = c.size();
  const CoValue& lhs = values[idx];
  for (std::size_t xl = 0; xl <= n; ++xl) {
    for (std::size_t yl = (mode == PreMode::plain ? 0 : 1); xl + yl <= n; ++yl) {
      const std::size_t zl = n - xl - yl;
      if (mode == PreMode::simplified && xl + zl != 1) continue;
      const std::size_t y_idx = sp.index_of_codes(std::span(c).subspan(xl, yl));
      if (mode == PreMode::plain) {
        e.all().equal_to(values[y_idx], values, e.cfg().tol, group);
      } else {
        e.by_length(yl).equal_to(values[y_idx], values, e.cfg().tol, group);
      }
      for (std::size_t yp : group) {
        if (yp == y_idx) continue;
        sp.codes(yp, yc);
        if (xl + yc.size() + zl > sp.max_len()) continue;
        t.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(xl));
        t.insert(t.end(), yc.begin(), yc.end());
        t.insert(t.end(), c.begin() + static_cast<std::ptrdiff_t>(xl + yl), c.end());
        const CoValue& rhs = values[sp.index_of_codes(t)];
        if (!e.same(lhs, rhs)) {
          Str s = sp.at(idx);
          const Span ss(s);
          Witness w = make_witness(ss.subspan(0, xl), ss.subspan(xl, yl), ss.subspan(xl + yl), lhs, rhs);
          w.y_prime = sp.at(yp);
          return w;
        }
      }
    }
  }
  return std::nullopt;
}

/// Same-valued strings of the given length for a random y: reversals,
/// rotations, sorting, negation, mass transfers, a diagonal preimage and a
/// random string, kept only when the value matches.
std::vector<Str> collisions(Engine& e, const Str& y, const CoValue& fy, std::size_t len, std::mt19937_64& rng) {
  std::vector<Str> cand;
  const bool real = e.domain().kind() == DomainDesc::Kind::real_interval;
  if (len == y.size() && !y.empty()) {
    cand.emplace_back(y.rbegin(), y.rend());
    for (std::size_t r = 1; r < y.size(); ++r) {
      Str t = y;
      std::rotate(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(r), t.end());
      cand.push_back(std::move(t));
    }
    if (real) {
      Str t = y;
      std::sort(t.begin(), t.end(), [](const Atom& a, const Atom& b) { return std::get<double>(a) < std::get<double>(b); });
      cand.push_back(std::move(t));
      Str neg;
      for (const Atom& a : y) neg.emplace_back(-std::get<double>(a));
      cand.push_back(std::move(neg));
      if (y.size() >= 2) {
        for (double d : {0.5, -0.5}) {
          Str m = y;
          m[0] = std::get<double>(m[0]) + d;
          m[1] = std::get<double>(m[1]) - d;
          cand.push_back(std::move(m));
        }
      }
    }
    cand.push_back(e.random_string(rng, len));
  }
  if (len > 0 && e.f().diagonal_inverse()) {
    if (auto u = e.f().diagonal_inverse()(len, fy)) cand.emplace_back(len, *u);
  }
  std::vector<Str> out;
  for (Str& t : cand) {
    if (t.size() != len) continue;
    if (std::any_of(t.begin(), t.end(), [&](const Atom& a) { return !e.domain().contains(a); })) continue;
    if (t.size() == y.size() && std::equal(t.begin(), t.end(), y.begin(), [](const Atom& a, const Atom& b) {
          return approx_equal(a, b);
        })) {
      continue;
    }
    if (!e.same(e.F(t), fy)) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<Witness> preassoc_sampled(Engine& e, const Str& s, std::mt19937_64& rng, PreMode mode) {
  const Span sp(s);
  const std::size_t n = s.size();
  const CoValue lhs = e.F(sp);
  for (std::size_t xl = 0; xl <= n; ++xl) {
    for (std::size_t yl = 1; xl + yl <= n; ++yl) {
      const std::size_t zl = n - xl - yl;
      if (mode == PreMode::simplified && xl + zl != 1) continue;
      const Span x = sp.subspan(0, xl), y = sp.subspan(xl, yl), z = sp.subspan(xl + yl);
      const Str ys(y.begin(), y.end());
      const CoValue fy = e.F(y);
      const std::size_t lo = mode == PreMode::plain ? 1 : yl;
      const std::size_t hi = mode == PreMode::plain ? e.max_len() - xl - zl : yl;
      for (std::size_t len = lo; len <= hi; ++len) {
        for (const Str& yp : collisions(e, ys, fy, len, rng)) {
          const CoValue rhs = e.F(concat(x, yp, z));
          if (!e.same(lhs, rhs)) {
            Witness w = make_witness(x, y, z, lhs, rhs);
            w.y_prime = yp;
            return w;
          }
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Witness> two_eq_grid(Engine& e, std::size_t idx) {
  const StringSpace& sp = e.space();
  const auto& values = e.values();
  std::vector<std::size_t> c, xc, yc, t, gx, gy;
  sp.codes(idx, c);
  const std::size_t n = c.size();
  const CoValue& lhs = values[idx];
  for (std::size_t xl = 0; xl <= n; ++xl) {
    const std::size_t yl = n - xl;
    const std::size_t x_idx = sp.index_of_codes(std::span(c).subspan(0, xl));
    const std::size_t y_idx = sp.index_of_codes(std::span(c).subspan(xl));
    e.by_length(xl).equal_to(values[x_idx], values, e.cfg().tol, gx);
    e.by_length(yl).equal_to(values[y_idx], values, e.cfg().tol, gy);
    for (std::size_t xp : gx) {
      sp.codes(xp, xc);
      for (std::size_t yp : gy) {
        if (xp == x_idx && yp == y_idx) continue;
        sp.codes(yp, yc);
        t = xc;
        t.insert(t.end(), yc.begin(), yc.end());
        const CoValue& rhs = values[sp.index_of_codes(t)];
        if (!e.same(lhs, rhs)) {
          Str s = sp.at(idx);
          const Span ss(s);
          Witness w = make_witness(ss.subspan(0, xl), ss.subspan(xl), {}, lhs, rhs);
          w.x_prime = sp.at(xp);
          w.y_prime = sp.at(yp);
          return w;
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<Witness> two_eq_sampled(Engine& e, const Str& s, std::mt19937_64& rng) {
  const Span sp(s);
  const CoValue lhs = e.F(sp);
  for (std::size_t xl = 0; xl <= s.size(); ++xl) {
    const Str x(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(xl));
    const Str y(s.begin() + static_cast<std::ptrdiff_t>(xl), s.end());
    std::vector<Str> xs{x}, ys{y};
    for (Str& t : collisions(e, x, e.F(x), x.size(), rng)) xs.push_back(std::move(t));
    for (Str& t : collisions(e, y, e.F(y), y.size(), rng)) ys.push_back(std::move(t));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < ys.size(); ++j) {
        if (i == 0 && j == 0) continue;
        const CoValue rhs = e.F(concat(xs[i], ys[j]));
        if (!e.same(lhs, rhs)) {
          Witness w = make_witness(x, y, {}, lhs, rhs);
          w.x_prime = xs[i];
          w.y_prime = ys[j];
          return w;
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

PropertyReport check_awqri(Engine& e, const std::string& name) {
  if (e.finite()) {
    // ran(delta_n) over the whole (finite) domain.
    std::vector<std::vector<CoValue>> diag(e.max_len() + 1);
    Plan p;
    p.name = name;
    p.min_len = 1;
    p.max_len = e.max_len();
    p.grid = [&e, &diag](std::size_t, const Str& s) -> std::optional<Witness> {
      const CoValue v = e.F(s);
      const auto& d = diag[s.size()];
      if (std::any_of(d.begin(), d.end(), [&](const CoValue& u) { return e.same(u, v); })) return std::nullopt;
      Witness w = make_witness({}, s, {}, v, std::nullopt);
      w.note = "value lies in ran(F_n) but not in ran(delta_n)";
      return w;
    };
    try {
      e.tabulate();
      for (std::size_t n = 1; n <= e.max_len(); ++n) {
        for (const Atom& u : e.space().alphabet()) diag[n].push_back(e.F(Str(n, u)));
      }
    } catch (const BudgetExhausted&) {
      PropertyReport r = unsupported_report(e, name, "budget exceeded");
      r.budget_exceeded = true;
      return r;
    }
    return execute(e, p);
  }
  if (!e.f().diagonal_inverse()) {
    return unsupported_report(e, name, "numeric domain without a closed-form diagonal quasi-inverse");
  }
  auto root = [&e](const Str& s) -> std::optional<Witness> {
    const CoValue v = e.F(s);
    auto u = e.f().diagonal_inverse()(s.size(), v);
    if (u && e.domain().contains(*u) && e.same(e.F(Str(s.size(), *u)), v)) return std::nullopt;
    Witness w = make_witness({}, s, {}, v, std::nullopt);
    w.note = "no u with F(u^n) equal to the value";
    return w;
  };
  return execute(e, simple_plan(name, 1, e.max_len(), root));
}

bool real_domain(const Engine& e) {
  if (e.domain().kind() == DomainDesc::Kind::real_interval) return true;
  if (!e.finite()) return false;
  const auto& el = e.domain().elements();
  return std::all_of(el.begin(), el.end(), [](const Atom& a) { return std::holds_alternative<double>(a); });
}

}  // namespace

std::optional<Str> substitute(const DomainDesc& domain, std::span<const Atom> x, const CoValue& v, std::size_t n,
                              std::span<const Atom> z) {
  Str t;
  t.reserve(x.size() + n + z.size());
  append(t, x);
  if (!append_power(domain, t, v, n)) return std::nullopt;
  append(t, z);
  return t;
}

PropertyReport check(const VarFn& f, Property p, const SearchConfig& cfg) {
  Engine e(f, cfg);
  const std::string name = to_string(p);
  const std::size_t L = e.max_len();
  switch (p.id) {
    case PropertyId::epsilon_standard: return is_epsilon_standard(f, cfg.max_len, cfg);
    case PropertyId::b_associative:
    case PropertyId::b_assoc_simplified: {
      const bool simplified = p.id == PropertyId::b_assoc_simplified;
      return execute(e, simple_plan(name, 1, L, [&e, simplified](const Str& s) { return root_b_assoc(e, s, simplified); }));
    }
    case PropertyId::b_assoc_form_ii:
      return execute(e, simple_plan(name, 1, L, [&e](const Str& s) { return root_form_ii(e, s); }));
    case PropertyId::b_assoc_form_iii:
      return execute(e, simple_plan(name, 1, L, [&e](const Str& s) { return root_form_iii(e, s); }));
    case PropertyId::b_assoc_form_iv:
      return execute(e, simple_plan(name, 1, L, [&e](const Str& s) { return root_form_iv(e, s); }));
    case PropertyId::associative:
      return execute(e, simple_plan(name, 1, L, [&e](const Str& s) { return root_associative(e, s); }));
    case PropertyId::arity_wise_range_idempotent:
      return execute(e, simple_plan(name, 1, L, [&e](const Str& s) { return root_awri(e, s); }));
    case PropertyId::arity_wise_quasi_range_idempotent: return check_awqri(e, name);
    case PropertyId::idempotent: {
      Plan plan = simple_plan(name, 1, L, [&e](const Str& s) { return root_idempotent(e, s); });
      plan.sampled = [&e](const Str& s, std::mt19937_64&) { return root_idempotent(e, Str(s.size(), s.front())); };
      return execute(e, plan);
    }
    case PropertyId::b_preassociative:
    case PropertyId::b_preassoc_simplified:
    case PropertyId::preassociative: {
      const PreMode mode = p.id == PropertyId::b_preassociative    ? PreMode::full
                           : p.id == PropertyId::preassociative ? PreMode::plain
                                                                : PreMode::simplified;
      Plan plan;
      plan.name = name;
      plan.min_len = 1;
      plan.max_len = L;
      plan.needs_indexes = true;
      plan.grid = [&e, mode](std::size_t idx, const Str&) { return preassoc_grid(e, idx, mode); };
      plan.sampled = [&e, mode](const Str& s, std::mt19937_64& rng) { return preassoc_sampled(e, s, rng, mode); };
      return execute(e, plan);
    }
    case PropertyId::b_preassoc_two_eq: {
      Plan plan;
      plan.name = name;
      plan.min_len = 1;
      plan.max_len = L;
      plan.needs_indexes = true;
      plan.grid = [&e](std::size_t idx, const Str&) { return two_eq_grid(e, idx); };
      plan.sampled = [&e](const Str& s, std::mt19937_64& rng) { return two_eq_sampled(e, s, rng); };
      return execute(e, plan);
    }
    case PropertyId::symmetric: {
      if (p.arity > L) return unsupported_report(e, name, "arity beyond the search bound");
      const std::size_t n = p.arity;
      return execute(e, simple_plan(name, n, n, [&e, n](const Str& s) { return root_symmetric(e, s, 0, n); }));
    }
    case PropertyId::strictly_increasing: {
      if (p.arity > L) return unsupported_report(e, name, "arity beyond the search bound");
      if (!real_domain(e)) return unsupported_report(e, name, "monotonicity needs real-valued atoms");
      Plan plan = simple_plan(name, p.arity, p.arity, [&e](const Str& s) { return root_increasing(e, s, nullptr); });
      plan.sampled = [&e](const Str& s, std::mt19937_64& rng) { return root_increasing(e, s, &rng); };
      return execute(e, plan);
    }
    case PropertyId::continuous_sampled: {
      if (p.arity > L) return unsupported_report(e, name, "arity beyond the search bound");
      if (e.domain().kind() != DomainDesc::Kind::real_interval) {
        return unsupported_report(e, name, "continuity is only sampled on real intervals");
      }
      PropertyReport r =
          execute(e, simple_plan(name, p.arity, p.arity, [&e](const Str& s) { return root_continuous(e, s); }));
      if (r.note.empty()) r.note = "heuristic: grid refinement jumps";
      return r;
    }
  }
  return unsupported_report(e, name, "unknown property");
}

PropertyReport is_epsilon_standard(const VarFn& f, std::size_t max_len, const SearchConfig& cfg) {
  SearchConfig c = cfg;
  c.max_len = max_len;
  Engine e(f, c);
  if (!f.default_value().is_epsilon()) {
    PropertyReport r;
    r.property = "epsilon_standard";
    r.status = Status::fail;
    r.space = describe_space(e);
    Witness w;
    w.lhs = f.default_value();
    w.note = "the empty string is not mapped to epsilon";
    r.witness = std::move(w);
    return r;
  }
  return execute(e, simple_plan("epsilon_standard", 1, e.max_len(),
                                [&e](const Str& s) { return root_epsilon_standard(e, s); }));
}

bool witness_reproduces(const VarFn& f, const PropertyReport& report, Tolerance tol) {
  if (report.status != Status::fail || !report.witness) return false;
  auto prop = parse_property(report.property);
  if (!prop) return false;
  const Witness& w = *report.witness;
  const DomainDesc& d = f.domain();
  auto F = [&](Span s) { return f(s); };
  auto Fs = [&](Span x, const CoValue& v, std::size_t n, Span z) -> std::optional<CoValue> {
    auto t = substitute(d, x, v, n, z);
    if (!t) return std::nullopt;
    return f(*t);
  };
  auto differ = [&](const std::optional<CoValue>& a, const std::optional<CoValue>& b) {
    return !a || !b || !approx_equal(*a, *b, tol);
  };
  switch (prop->id) {
    case PropertyId::epsilon_standard:
      return w.y.empty() ? !f.default_value().is_epsilon() : F(w.y).is_epsilon();
    case PropertyId::b_associative:
    case PropertyId::b_assoc_simplified:
      return differ(F(concat(w.x, w.y, w.z)), Fs(w.x, F(w.y), w.y.size(), w.z));
    case PropertyId::b_assoc_form_ii: {
      if (!w.x_prime || !w.z_prime) return false;
      if (concat(w.x, w.y, w.z) != concat(*w.x_prime, w.y_prime, *w.z_prime)) return false;
      return differ(Fs(w.x, F(w.y), w.y.size(), w.z), Fs(*w.x_prime, F(w.y_prime), w.y_prime.size(), *w.z_prime));
    }
    case PropertyId::b_assoc_form_iii: {
      const Str xy = concat(w.x, w.y), yz = concat(w.y, w.z);
      return differ(Fs({}, F(xy), xy.size(), w.z), Fs(w.x, F(yz), yz.size(), {}));
    }
    case PropertyId::b_assoc_form_iv: {
      Str t;
      std::optional<CoValue> rhs;
      if (append_power(d, t, F(w.x), w.x.size()) && append_power(d, t, F(w.y), w.y.size())) rhs = F(t);
      return differ(F(concat(w.x, w.y)), rhs);
    }
    case PropertyId::associative: return differ(F(concat(w.x, w.y, w.z)), Fs(w.x, F(w.y), 1, w.z));
    case PropertyId::arity_wise_range_idempotent: return differ(F(w.y), Fs({}, F(w.y), w.y.size(), {}));
    case PropertyId::idempotent: return !w.y.empty() && differ(F(w.y), CoValue(w.y.front()));
    case PropertyId::b_preassociative:
    case PropertyId::b_preassoc_simplified:
    case PropertyId::preassociative:
      return approx_equal(F(w.y), F(w.y_prime), tol) &&
             differ(F(concat(w.x, w.y, w.z)), F(concat(w.x, w.y_prime, w.z)));
    case PropertyId::b_preassoc_two_eq:
      return w.x_prime && approx_equal(F(w.x), F(*w.x_prime), tol) && approx_equal(F(w.y), F(w.y_prime), tol) &&
             differ(F(concat(w.x, w.y)), F(concat(*w.x_prime, w.y_prime)));
    case PropertyId::arity_wise_quasi_range_idempotent: {
      const CoValue v = F(w.y);
      if (d.is_finite()) {
        for (const Atom& u : d.elements()) {
          if (approx_equal(f(Str(w.y.size(), u)), v, tol)) return false;
        }
        return true;
      }
      auto u = f.diagonal_inverse() ? f.diagonal_inverse()(w.y.size(), v) : std::nullopt;
      return !(u && d.contains(*u) && approx_equal(f(Str(w.y.size(), *u)), v, tol));
    }
    case PropertyId::symmetric: return differ(F(w.y), F(w.y_prime));
    case PropertyId::strictly_increasing: {
      const CoValue a = F(w.y), b = F(w.y_prime);
      return !is_real(a) || !is_real(b) || !(b.real() > a.real());
    }
    case PropertyId::continuous_sampled: return true;  // heuristic; the jump itself is the evidence
  }
  return false;
}

// ---------------------------------------------------------------------------

std::vector<Str> probe_strings(const DomainDesc& domain, std::size_t len, const SearchConfig& cfg,
                               std::size_t random_count) {
  std::vector<Str> out;
  if (domain.is_finite()) {
    StringSpace sp(domain.elements(), len);
    for (std::size_t i = sp.offset(len); i < sp.size(); ++i) out.push_back(sp.at(i));
    return out;
  }
  if (len <= cfg.grid_len) {
    StringSpace sp(core_alphabet(domain), len);
    for (std::size_t i = sp.offset(len); i < sp.size(); ++i) out.push_back(sp.at(i));
  }
  // Random strings reuse the engine's atom distribution through a throwaway function.
  const VarFn probe = VarFn::closed_form("probe", nlohmann::json::object(), domain, domain,
                                         [](Span) { return CoValue::epsilon(); });
  SearchConfig c = cfg;
  c.max_len = std::max<std::size_t>(len, 1);
  Engine e(probe, c);
  for (std::size_t k = 0; k < random_count; ++k) {
    auto rng = instance_rng(cfg.seed ^ (0x9E37ULL * (len + 1)), k);
    out.push_back(e.random_string(rng, len));
  }
  return out;
}

PropertyReport check_identity(const VarFn& f, std::string name, const SearchConfig& cfg, std::size_t min_len,
                              std::size_t max_len, const StringCheck& check) {
  const auto start = Clock::now();
  PropertyReport r;
  r.property = std::move(name);
  r.space.mode = f.domain().is_finite() ? SearchMode::exhaustive : SearchMode::sampled;
  r.space.max_len = max_len;
  r.space.alphabet_size = core_alphabet(f.domain()).size();
  r.space.samples = f.domain().is_finite() ? 0 : cfg.samples;
  r.space.seed = cfg.seed;
  const std::size_t lengths = max_len >= min_len ? max_len - min_len + 1 : 0;
  const std::size_t per_len = lengths ? (cfg.samples + lengths - 1) / lengths : 0;
  try {
    EvalBudget budget(cfg.budget);
    for (std::size_t len = min_len; len <= max_len; ++len) {
      const auto strings = probe_strings(f.domain(), len, cfg, f.domain().is_finite() ? 0 : per_len);
      budget.spend(strings.size());
      auto hit = first_hit<Witness>(0, strings.size(), cfg.jobs, [&](std::size_t i) { return check(strings[i]); });
      r.space.instances += hit ? hit->first + 1 : strings.size();
      if (hit) {
        r.status = Status::fail;
        r.witness = std::move(hit->second);
        break;
      }
    }
  } catch (const BudgetExhausted&) {
    r.status = Status::unsupported;
    r.budget_exceeded = true;
    r.note = "budget exceeded";
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

bool agree_all(const std::vector<std::pair<std::string, Status>>& v) {
  std::optional<Status> first;
  for (const auto& [name, s] : v) {
    if (s == Status::unsupported) continue;
    if (!first) first = s;
    if (*first != s) return false;
  }
  return true;
}

std::vector<Atom> probe_alphabet(const VarFn& f, const SearchConfig& cfg) {
  return f.domain().is_finite() ? f.domain().elements() : sample_alphabet(f.domain(), cfg);
}

}  // namespace

std::vector<EquivalenceOutcome> check_equivalence_suite(const VarFn& f, const SearchConfig& cfg) {
  std::map<PropertyId, Status> verdicts;
  auto v = [&](PropertyId id) {
    auto it = verdicts.find(id);
    if (it == verdicts.end()) it = verdicts.emplace(id, check(f, Property{id}, cfg).status).first;
    return it->second;
  };
  auto nm = [](PropertyId id) { return to_string(Property{id}); };
  std::vector<EquivalenceOutcome> out;

  auto pairwise = [&](std::string relation, std::vector<PropertyId> ids) {
    EquivalenceOutcome o;
    o.relation = std::move(relation);
    for (PropertyId id : ids) o.verdicts.emplace_back(nm(id), v(id));
    o.agree = agree_all(o.verdicts);
    if (!o.agree) o.detail = "verdicts differ";
    out.push_back(std::move(o));
  };
  pairwise("B-associativity forms (i)-(iv)", {PropertyId::b_associative, PropertyId::b_assoc_form_ii,
                                               PropertyId::b_assoc_form_iii, PropertyId::b_assoc_form_iv});
  pairwise("B-associativity with |xz| <= 1", {PropertyId::b_associative, PropertyId::b_assoc_simplified});
  pairwise("B-preassociativity with two equations", {PropertyId::b_preassociative, PropertyId::b_preassoc_two_eq});
  pairwise("B-preassociativity with |xz| = 1", {PropertyId::b_preassociative, PropertyId::b_preassoc_simplified});

  const Status ba = v(PropertyId::b_associative);
  const Status bp = v(PropertyId::b_preassociative);
  const Status awri = v(PropertyId::arity_wise_range_idempotent);
  const bool decided = ba != Status::unsupported && bp != Status::unsupported && awri != Status::unsupported;
  {
    EquivalenceOutcome o;
    o.relation = "B-associative iff B-preassociative and arity-wise range-idempotent";
    o.verdicts = {{nm(PropertyId::b_associative), ba},
                  {nm(PropertyId::b_preassociative), bp},
                  {nm(PropertyId::arity_wise_range_idempotent), awri}};
    o.agree = !decided || ((ba == Status::pass) == (bp == Status::pass && awri == Status::pass));
    if (!o.agree) o.detail = "conjunction disagrees with B-associativity";
    out.push_back(std::move(o));
  }
  {
    EquivalenceOutcome o;
    o.relation = "B-associative implies arity-wise range-idempotent";
    o.verdicts = {{nm(PropertyId::b_associative), ba}, {nm(PropertyId::arity_wise_range_idempotent), awri}};
    o.agree = !(ba == Status::pass && awri == Status::fail);
    if (!o.agree) o.detail = "B-associative but not arity-wise range-idempotent";
    out.push_back(std::move(o));
  }

  // Implications evaluated directly on diagonals over the probe alphabet.
  const std::size_t L = effective_max_len(f, cfg);
  const std::vector<Atom> alpha = probe_alphabet(f, cfg);
  const Tolerance tol = cfg.tol;
  auto delta = [&](std::size_t n, const Atom& u) { return f(Str(n, u)); };
  auto injective = [&](std::size_t n) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (std::size_t j = i + 1; j < alpha.size(); ++j) {
        if (approx_equal(delta(n, alpha[i]), delta(n, alpha[j]), tol)) return false;
      }
    }
    return true;
  };
  auto identity = [&](std::size_t n) {
    return std::all_of(alpha.begin(), alpha.end(),
                       [&](const Atom& u) { return approx_equal(delta(n, u), CoValue(u), tol); });
  };

  {
    EquivalenceOutcome o;
    o.relation = "B-associative epsilon-standard with one-to-one diagonal has identity diagonal";
    const Status es = is_epsilon_standard(f, L, cfg).status;
    o.verdicts = {{nm(PropertyId::b_associative), ba}, {"epsilon_standard", es}};
    if (ba == Status::pass && es == Status::pass) {
      for (std::size_t n = 1; n <= L; ++n) {
        if (injective(n) && !identity(n)) {
          o.agree = false;
          o.detail = "diagonal at arity " + std::to_string(n) + " is one-to-one but not the identity";
          break;
        }
      }
    }
    out.push_back(std::move(o));
  }
  {
    EquivalenceOutcome o;
    o.relation = "range-idempotent arity with one-to-one diagonal is idempotent";
    SearchConfig c = cfg;
    for (std::size_t n = 1; n <= L; ++n) {
      const VarFn fn = f;
      PropertyReport ri = check_identity(f, "range_idempotent(" + std::to_string(n) + ")", c, n, n,
                                         [&fn, &tol](const Str& s) -> std::optional<Witness> {
                                           const CoValue v = fn(s);
                                           auto t = substitute(fn.domain(), {}, v, s.size(), {});
                                           if (t && approx_equal(fn(*t), v, tol)) return std::nullopt;
                                           return Witness{};
                                         });
      o.verdicts.emplace_back(ri.property, ri.status);
      if (ri.status == Status::pass && injective(n) && !identity(n)) {
        o.agree = false;
        o.detail = "arity " + std::to_string(n) + " is range-idempotent with one-to-one diagonal but not idempotent";
        break;
      }
    }
    out.push_back(std::move(o));
  }
  {
    EquivalenceOutcome o;
    o.relation = "an epsilon value on a nonempty string forces an epsilon default";
    o.verdicts = {{nm(PropertyId::b_associative), ba}};
    if (ba == Status::pass && !f.default_value().is_epsilon()) {
      PropertyReport es = is_epsilon_standard(f.with_default(CoValue::epsilon()), L, cfg);
      if (es.status == Status::fail) {
        o.agree = false;
        o.detail = "B-associative with an epsilon value but a non-epsilon default";
      }
    }
    out.push_back(std::move(o));
  }
  {
    EquivalenceOutcome o;
    o.relation = "diagonal at arity kn absorbs the diagonal at arity k";
    o.verdicts = {{nm(PropertyId::b_associative), ba}};
    if (ba == Status::pass) {
      for (std::size_t k = 1; k <= L && o.agree; ++k) {
        for (std::size_t m = 2; k * m <= L && o.agree; ++m) {
          for (const Atom& u : alpha) {
            const CoValue inner = delta(k, u);
            auto t = substitute(f.domain(), {}, inner, k * m, {});
            if (!t || !approx_equal(f(*t), delta(k * m, u), tol)) {
              o.agree = false;
              o.detail = "fails at k = " + std::to_string(k) + ", kn = " + std::to_string(k * m) + ", x = " +
                         to_string(u);
              break;
            }
          }
        }
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

bool all_agree(const std::vector<EquivalenceOutcome>& outcomes) {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const EquivalenceOutcome& o) { return o.agree; });
}

// ---------------------------------------------------------------------------

VarFn compose(const VarFn& f, const CompositionMaps& maps, std::size_t arity_needed) {
  if (maps.maps.empty()) throw Error(ErrorCode::arity_mismatch, "composition needs at least one map");
  nlohmann::json params = {{"base", f.name()}, {"map", maps.label}};
  if (maps.side == CompositionSide::right) {
    if (maps.maps.size() != 1) throw Error(ErrorCode::arity_mismatch, "right composition takes exactly one map");
    const AtomMap g = maps.maps.front();
    params["side"] = "right";
    return VarFn::closed_form(
               "right_composition", params, f.domain(), maps.codomain.value_or(f.codomain()),
               [f, g](Span x) {
                 Str t;
                 t.reserve(x.size());
                 for (const Atom& a : x) t.push_back(g(a));
                 return f(t);
               },
               f.max_arity(), f.default_value())
        .with_epsilon_standard_claim(f.claims_epsilon_standard());
  }
  if (maps.maps.size() > 1 && maps.maps.size() < arity_needed) {
    throw Error(ErrorCode::arity_mismatch, "left composition has " + std::to_string(maps.maps.size()) +
                                               " per-arity maps but arity " + std::to_string(arity_needed) +
                                               " is needed");
  }
  params["side"] = "left";
  const std::vector<AtomMap> gs = maps.maps;
  return VarFn::closed_form(
             "left_composition", params, f.domain(), maps.codomain.value_or(DomainDesc::reals()),
             [f, gs](Span x) {
               const CoValue v = f(x);
               if (v.is_epsilon()) return v;
               if (gs.size() > 1 && x.size() > gs.size()) {
                 throw Error(ErrorCode::arity_mismatch, "no outer map for arity " + std::to_string(x.size()));
               }
               const AtomMap& g = gs.size() == 1 ? gs.front() : gs[x.size() - 1];
               return CoValue(g(v.value()));
             },
             f.max_arity(), f.default_value())
      .with_epsilon_standard_claim(f.claims_epsilon_standard());
}

PropertyReport check_composition_closure(const VarFn& f, const CompositionMaps& maps, const SearchConfig& cfg) {
  const std::size_t L = effective_max_len(f, cfg);
  const VarFn h = compose(f, maps, L);
  const PropertyReport base = check(f, PropertyId::b_preassociative, cfg);
  PropertyReport r = check(h, PropertyId::b_preassociative, cfg);
  const bool right = maps.side == CompositionSide::right;
  r.property = std::string("composition_") + (right ? "right" : "left") +
               (maps.label.empty() ? "" : ":" + maps.label);
  const bool hypotheses = base.passed() && (right || maps.injective_on_range);
  std::string note = "base b_preassociative: " + std::string(to_string(base.status));
  if (!right) note += maps.injective_on_range ? "; outer maps certified one-to-one on ranges"
                                              : "; no injectivity certificate";
  if (r.failed() && hypotheses) {
    r.critical = true;
    note += "; closure violated although its hypotheses hold";
  }
  r.note = r.note.empty() ? note : r.note + "; " + note;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t probe_count(const SearchConfig& cfg) { return std::max<std::size_t>(cfg.samples / 8, 64); }

/// First string of the given length (in probe order) whose value changes under
/// an adjacent transposition inside positions [from, to).
std::optional<Witness> find_asymmetry(const VarFn& f, std::size_t len, std::size_t from, std::size_t to,
                                      const SearchConfig& cfg) {
  for (const Str& s : probe_strings(f.domain(), len, cfg, f.domain().is_finite() ? 0 : probe_count(cfg))) {
    const CoValue lhs = f(s);
    for (std::size_t i = from; i + 1 < to; ++i) {
      Str t = s;
      std::swap(t[i], t[i + 1]);
      const CoValue rhs = f(t);
      if (!approx_equal(lhs, rhs, cfg.tol)) {
        Witness w = make_witness({}, s, {}, lhs, rhs);
        w.y_prime = std::move(t);
        return w;
      }
    }
  }
  return std::nullopt;
}

std::optional<Witness> find_nonconstant(const VarFn& f, std::size_t len, const SearchConfig& cfg) {
  const auto strings = probe_strings(f.domain(), len, cfg, f.domain().is_finite() ? 0 : probe_count(cfg));
  if (strings.empty()) return std::nullopt;
  const CoValue first = f(strings.front());
  for (const Str& s : strings) {
    const CoValue v = f(s);
    if (!approx_equal(first, v, cfg.tol)) {
      Witness w = make_witness({}, strings.front(), {}, first, v);
      w.y_prime = s;
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

PropertyReport check_propagation(const VarFn& f, PropagationKind kind, std::size_t k, const SearchConfig& cfg,
                                 PropertyId basis) {
  const auto start = Clock::now();
  const std::size_t L = effective_max_len(f, cfg);
  PropertyReport r;
  const char* kind_name = kind == PropagationKind::symmetry   ? "symmetry"
                          : kind == PropagationKind::constant ? "constant"
                                                              : "inner_symmetry";
  r.property = std::string("propagation_") + kind_name + "(" + std::to_string(k) + ")";
  r.space.mode = f.domain().is_finite() ? SearchMode::exhaustive : SearchMode::sampled;
  r.space.max_len = L;
  r.space.seed = cfg.seed;

  const std::size_t needed = kind == PropagationKind::inner_symmetry ? k + 3 : k + 1;
  const std::size_t min_k = kind == PropagationKind::constant ? 1 : 2;
  if (k < min_k || needed > L) {
    r.status = Status::unsupported;
    r.note = "arity " + std::to_string(k) + " outside the range this implication covers within max_len " +
             std::to_string(L);
    return r;
  }
  const PropertyReport base = check(f, basis, cfg);
  if (!base.passed()) {
    r.status = Status::unsupported;
    r.note = "precondition unmet: " + base.property + " is " + std::string(to_string(base.status));
    return r;
  }

  std::optional<Witness> hyp, concl;
  switch (kind) {
    case PropagationKind::symmetry:
      hyp = find_asymmetry(f, k, 0, k, cfg);
      if (!hyp) concl = find_asymmetry(f, k + 1, 0, k + 1, cfg);
      break;
    case PropagationKind::constant:
      hyp = find_nonconstant(f, k, cfg);
      if (!hyp) concl = find_nonconstant(f, k + 1, cfg);
      break;
    case PropagationKind::inner_symmetry:
      hyp = find_asymmetry(f, k + 2, 1, k + 1, cfg);
      if (!hyp) concl = find_asymmetry(f, k + 3, 1, k + 2, cfg);
      break;
  }
  if (hyp) {
    r.status = Status::pass;
    r.vacuous = true;
    r.note = "hypothesis fails at arity " + std::to_string(k) + " (witness " + to_string(hyp->y) + " vs " +
             to_string(hyp->y_prime) + ")";
  } else if (concl) {
    r.status = Status::fail;
    r.critical = true;
    r.witness = std::move(concl);
    r.note = "hypothesis holds but the conclusion fails";
  } else {
    r.status = Status::pass;
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return r;
}

PropertyReport check_determination(const VarFn& f, const VarFn& g, const std::vector<SectionSide>& sides,
                                   const SearchConfig& cfg) {
  const auto start = Clock::now();
  if (!(f.domain() == g.domain())) throw Error(ErrorCode::domain_mismatch, "determination needs a common domain");
  const std::size_t L = std::min(effective_max_len(f, cfg), effective_max_len(g, cfg));
  PropertyReport r;
  r.property = "determination";
  r.space.mode = f.domain().is_finite() ? SearchMode::exhaustive : SearchMode::sampled;
  r.space.max_len = L;
  r.space.seed = cfg.seed;
  auto finish = [&] {
    r.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return r;
  };

  auto passes = [&](const VarFn& h, PropertyId id) { return check(h, id, cfg).passed(); };
  const bool assoc_case = passes(f, PropertyId::b_associative) && passes(g, PropertyId::b_associative) &&
                          is_epsilon_standard(f, L, cfg).passed() && is_epsilon_standard(g, L, cfg).passed();
  const bool preassoc_case =
      !assoc_case && passes(f, PropertyId::b_preassociative) && passes(g, PropertyId::b_preassociative) &&
      passes(f, PropertyId::arity_wise_quasi_range_idempotent) && passes(g, PropertyId::arity_wise_quasi_range_idempotent);
  if (!assoc_case && !preassoc_case) {
    r.status = Status::unsupported;
    r.note = "precondition unmet: neither both B-associative and epsilon-standard nor both B-preassociative and "
             "arity-wise quasi-range-idempotent";
    return finish();
  }
  r.note = assoc_case ? "basis: B-associative epsilon-standard" : "basis: B-preassociative quasi-range-idempotent";

  const std::vector<Atom> alpha = probe_alphabet(f, cfg);
  for (std::size_t k = 1; k <= L; ++k) {
    const SectionSide side = sides.empty() ? SectionSide::r : sides[std::min(k, sides.size()) - 1];
    const DiagonalSections sf = sections(f, k), sg = sections(g, k);
    for (const Atom& x : alpha) {
      for (const Atom& y : alpha) {
        const CoValue a = side == SectionSide::r ? sf.delta_r(x, y) : sf.delta_l(x, y);
        const CoValue b = side == SectionSide::r ? sg.delta_r(x, y) : sg.delta_l(x, y);
        if (!approx_equal(a, b, cfg.tol)) {
          r.status = Status::unsupported;
          Witness w = make_witness(Str{x}, Str{y}, {}, a, b);
          w.note = std::string("sections ") + (side == SectionSide::r ? "delta_r" : "delta_l") +
                   " differ at arity " + std::to_string(k);
          r.witness = std::move(w);
          r.note = "precondition unmet: sections differ at arity " + std::to_string(k);
          return finish();
        }
      }
    }
  }

  const std::size_t random_count = f.domain().is_finite() ? 0 : probe_count(cfg);
  for (std::size_t len = 1; len <= L; ++len) {
    for (const Str& s : probe_strings(f.domain(), len, cfg, random_count)) {
      ++r.space.instances;
      const CoValue a = f(s), b = g(s);
      if (!approx_equal(a, b, cfg.tol)) {
        r.status = Status::fail;
        r.critical = true;
        r.witness = make_witness({}, s, {}, a, b);
        r.note += "; functions differ although their sections agree";
        return finish();
      }
    }
  }
  r.status = Status::pass;
  return finish();
}

}  // namespace barylab
