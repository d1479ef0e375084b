#include "barylab/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace barylab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::arity_exceeded: return "ArityExceeded";
    case ErrorCode::arity_mismatch: return "ArityMismatch";
    case ErrorCode::domain_mismatch: return "DomainMismatch";
    case ErrorCode::unknown_name: return "UnknownName";
    case ErrorCode::generator_not_invertible: return "GeneratorNotInvertible";
    case ErrorCode::format: return "FormatError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::unsupported: return "Unsupported";
    case ErrorCode::empty_domain: return "EmptyDomain";
    case ErrorCode::not_b_preassociative: return "NotBPreassociative";
    case ErrorCode::not_quasi_range_idempotent: return "NotQuasiRangeIdempotent";
    case ErrorCode::diagonal_not_injective: return "DiagonalNotInjective";
    case ErrorCode::degenerate_fit: return "DegenerateFit";
    case ErrorCode::budget_exceeded: return "BudgetExceeded";
  }
  return "Error";
}

bool approx_equal(double a, double b, Tolerance tol) {
  if (a == b) return true;
  if (!std::isfinite(a) || !std::isfinite(b)) return false;
  const double diff = std::abs(a - b);
  return diff <= std::max(tol.abs, tol.rel * std::max(std::abs(a), std::abs(b)));
}

bool approx_equal(const Atom& a, const Atom& b, Tolerance tol) {
  if (a.index() != b.index()) return false;
  if (const auto* da = std::get_if<double>(&a)) return approx_equal(*da, std::get<double>(b), tol);
  if (const auto* sa = std::get_if<std::string>(&a)) return *sa == std::get<std::string>(b);
  const auto& pa = std::get<Point>(a);
  const auto& pb = std::get<Point>(b);
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!approx_equal(pa[i], pb[i], tol)) return false;
  }
  return true;
}

namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string to_string(const Atom& a) {
  if (const auto* d = std::get_if<double>(&a)) return format_double(*d);
  if (const auto* s = std::get_if<std::string>(&a)) return *s;
  std::string out = "(";
  const auto& p = std::get<Point>(a);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ",";
    out += format_double(p[i]);
  }
  return out + ")";
}

std::string to_string(std::span<const Atom> s) {
  if (s.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += to_string(s[i]);
  }
  return out;
}

const Atom& CoValue::value() const {
  if (!value_) throw Error(ErrorCode::invalid_argument, "epsilon has no atom value");
  return *value_;
}

double CoValue::real() const {
  const auto* d = std::get_if<double>(&value());
  if (!d) throw Error(ErrorCode::invalid_argument, "value is not a real number: " + to_string(*this));
  return *d;
}

bool approx_equal(const CoValue& a, const CoValue& b, Tolerance tol) {
  if (a.is_epsilon() || b.is_epsilon()) return a.is_epsilon() && b.is_epsilon();
  return approx_equal(a.value(), b.value(), tol);
}

std::string to_string(const CoValue& v) { return v.is_epsilon() ? "ε" : to_string(v.value()); }

Str concat(std::span<const Atom> a, std::span<const Atom> b) {
  Str out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Str concat(std::span<const Atom> a, std::span<const Atom> b, std::span<const Atom> c) {
  Str out;
  out.reserve(a.size() + b.size() + c.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

Str power(std::span<const Atom> x, std::size_t n) {
  Str out;
  out.reserve(x.size() * n);
  for (std::size_t i = 0; i < n; ++i) out.insert(out.end(), x.begin(), x.end());
  return out;
}

Str power(const CoValue& v, std::size_t n) {
  if (v.is_epsilon()) return {};
  return Str(n, v.value());
}

// ---------------------------------------------------------------------------

bool Interval::contains(double x) const {
  if (std::isnan(x)) return false;
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

std::string Interval::describe() const {
  return std::string(lo_closed ? "[" : "(") + format_double(lo) + ", " + format_double(hi) +
         (hi_closed ? "]" : ")");
}

DomainDesc DomainDesc::finite(std::vector<Atom> elements) {
  if (elements.empty()) throw Error(ErrorCode::empty_domain, "finite domain has no elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (const auto* s = std::get_if<std::string>(&elements[i]); s && *s == "epsilon") {
      throw Error(ErrorCode::invalid_argument, "\"epsilon\" is reserved and cannot be a domain atom");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (approx_equal(elements[i], elements[j])) {
        throw Error(ErrorCode::invalid_argument, "duplicate domain atom " + to_string(elements[i]));
      }
    }
  }
  DomainDesc d;
  d.kind_ = Kind::finite;
  d.elements_ = std::move(elements);
  return d;
}

DomainDesc DomainDesc::interval(Interval iv) {
  if (!(iv.lo <= iv.hi)) throw Error(ErrorCode::invalid_argument, "empty interval " + iv.describe());
  DomainDesc d;
  d.kind_ = Kind::real_interval;
  d.interval_ = iv;
  return d;
}

DomainDesc DomainDesc::vectors(std::size_t dimension) {
  if (dimension == 0) throw Error(ErrorCode::invalid_argument, "vector space dimension must be positive");
  DomainDesc d;
  d.kind_ = Kind::vector_space;
  d.dimension_ = dimension;
  return d;
}

const std::vector<Atom>& DomainDesc::elements() const {
  if (kind_ != Kind::finite) throw Error(ErrorCode::unsupported, "domain is not finite");
  return elements_;
}

const Interval& DomainDesc::interval() const {
  if (kind_ != Kind::real_interval) throw Error(ErrorCode::unsupported, "domain is not a real interval");
  return interval_;
}

std::size_t DomainDesc::dimension() const {
  if (kind_ != Kind::vector_space) throw Error(ErrorCode::unsupported, "domain is not a vector space");
  return dimension_;
}

std::optional<std::size_t> DomainDesc::index_of(const Atom& a) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (approx_equal(elements_[i], a)) return i;
  }
  return std::nullopt;
}

bool DomainDesc::contains(const Atom& a) const {
  switch (kind_) {
    case Kind::finite: return index_of(a).has_value();
    case Kind::real_interval: {
      const auto* d = std::get_if<double>(&a);
      return d && interval_.contains(*d);
    }
    case Kind::vector_space: {
      const auto* p = std::get_if<Point>(&a);
      return p && p->size() == dimension_ &&
             std::all_of(p->begin(), p->end(), [](double v) { return std::isfinite(v); });
    }
  }
  return false;
}

std::string DomainDesc::describe() const {
  switch (kind_) {
    case Kind::finite: {
      std::string out = "{";
      for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (i) out += ", ";
        out += to_string(elements_[i]);
      }
      return out + "}";
    }
    case Kind::real_interval: return interval_.describe();
    case Kind::vector_space: return "R^" + std::to_string(dimension_);
  }
  return {};
}

// ---------------------------------------------------------------------------

StringSpace::StringSpace(std::vector<Atom> alphabet, std::size_t max_len)
    : alphabet_(std::move(alphabet)), max_len_(max_len) {
  if (alphabet_.empty()) throw Error(ErrorCode::empty_domain, "string space over an empty alphabet");
  offsets_.reserve(max_len + 2);
  offsets_.push_back(0);
  std::size_t count = 1;
  for (std::size_t len = 0; len <= max_len; ++len) {
    offsets_.push_back(offsets_.back() + count);
    if (count > (std::size_t{1} << 40) / alphabet_.size()) {
      throw Error(ErrorCode::budget_exceeded, "string space too large");
    }
    count *= alphabet_.size();
  }
}

std::size_t StringSpace::length_of(std::size_t index) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

void StringSpace::codes(std::size_t index, std::vector<std::size_t>& out) const {
  const std::size_t len = length_of(index);
  std::size_t rest = index - offsets_[len];
  out.assign(len, 0);
  for (std::size_t i = len; i-- > 0;) {
    out[i] = rest % alphabet_.size();
    rest /= alphabet_.size();
  }
}

Str StringSpace::at(std::size_t index) const {
  std::vector<std::size_t> c;
  codes(index, c);
  Str s;
  s.reserve(c.size());
  for (std::size_t k : c) s.push_back(alphabet_[k]);
  return s;
}

std::size_t StringSpace::index_of_codes(std::span<const std::size_t> codes) const {
  std::size_t rest = 0;
  for (std::size_t c : codes) rest = rest * alphabet_.size() + c;
  return offsets_.at(codes.size()) + rest;
}

std::optional<std::size_t> StringSpace::code_of(const Atom& a) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    if (alphabet_[i] == a) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> StringSpace::index_of(std::span<const Atom> s) const {
  if (s.size() > max_len_) return std::nullopt;
  std::size_t rest = 0;
  for (const Atom& a : s) {
    auto c = code_of(a);
    if (!c) return std::nullopt;
    rest = rest * alphabet_.size() + *c;
  }
  return offsets_[s.size()] + rest;
}

// ---------------------------------------------------------------------------

VarFn VarFn::closed_form(std::string name, nlohmann::json params, DomainDesc domain, DomainDesc codomain,
                         Evaluator evaluate, std::optional<std::size_t> max_arity, CoValue default_value) {
  if (max_arity && *max_arity == 0) throw Error(ErrorCode::invalid_argument, "max_arity must be positive");
  VarFn f;
  f.name_ = std::move(name);
  f.params_ = std::move(params);
  f.domain_ = std::move(domain);
  f.codomain_ = std::move(codomain);
  f.max_arity_ = max_arity;
  f.default_ = std::move(default_value);
  f.evaluate_ = std::make_shared<const Evaluator>(std::move(evaluate));
  return f;
}

VarFn VarFn::tabulated(DomainDesc domain, DomainDesc codomain, std::size_t max_arity,
                       std::vector<CoValue> entries, std::string name) {
  if (!domain.is_finite()) throw Error(ErrorCode::unsupported, "tabulated functions need a finite domain");
  if (max_arity == 0) throw Error(ErrorCode::invalid_argument, "max_arity must be positive");
  StringSpace space(domain.elements(), max_arity);
  if (entries.size() != space.size()) {
    throw Error(ErrorCode::format, "table has " + std::to_string(entries.size()) + " entries, expected " +
                                       std::to_string(space.size()));
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].is_epsilon() && !codomain.contains(entries[i].value())) {
      throw Error(ErrorCode::domain_mismatch,
                  "table value " + to_string(entries[i]) + " lies outside the codomain " + codomain.describe());
    }
  }
  VarFn f;
  f.name_ = std::move(name);
  f.domain_ = std::move(domain);
  f.codomain_ = std::move(codomain);
  f.max_arity_ = max_arity;
  f.default_ = entries.front();
  f.table_ = std::make_shared<const Table>(Table{std::move(space), std::move(entries)});
  return f;
}

void VarFn::check_input(std::span<const Atom> x) const {
  if (max_arity_ && x.size() > *max_arity_) {
    throw Error(ErrorCode::arity_exceeded, name_ + ": string of length " + std::to_string(x.size()) +
                                               " exceeds max arity " + std::to_string(*max_arity_));
  }
  if (table_) return;  // membership is checked by the lookup
  for (const Atom& a : x) {
    if (!domain_.contains(a)) {
      throw Error(ErrorCode::domain_mismatch, name_ + ": atom " + to_string(a) + " outside " + domain_.describe());
    }
  }
}

CoValue VarFn::operator()(std::span<const Atom> x) const {
  if (x.empty()) return default_;
  check_input(x);
  if (table_) {
    const std::size_t n = domain_.elements().size();
    std::size_t rest = 0;
    for (const Atom& a : x) {
      auto idx = domain_.index_of(a);
      if (!idx) {
        throw Error(ErrorCode::domain_mismatch, name_ + ": atom " + to_string(a) + " outside " + domain_.describe());
      }
      rest = rest * n + *idx;
    }
    return table_->entries[table_->space.offset(x.size()) + rest];
  }
  return (*evaluate_)(x);
}

const std::vector<CoValue>& VarFn::table_entries() const {
  if (!table_) throw Error(ErrorCode::unsupported, name_ + " is not tabulated");
  return table_->entries;
}

VarFn VarFn::with_diagonal_inverse(DiagonalInverse inv) const {
  VarFn f = *this;
  f.diagonal_inverse_ = std::move(inv);
  return f;
}

VarFn VarFn::with_default(CoValue v) const {
  VarFn f = *this;
  f.default_ = v;
  if (f.table_) {
    auto table = std::make_shared<Table>(*f.table_);
    table->entries.front() = std::move(v);
    f.table_ = std::move(table);
  }
  return f;
}

VarFn VarFn::with_name(std::string name, nlohmann::json params) const {
  VarFn f = *this;
  f.name_ = std::move(name);
  f.params_ = std::move(params);
  return f;
}

VarFn VarFn::with_epsilon_standard_claim(bool claim) const {
  VarFn f = *this;
  f.epsilon_standard_ = claim;
  return f;
}

CoValue eval(const VarFn& f, std::span<const Atom> x) { return f(x); }

VarFn tabulate(const VarFn& f, std::vector<Atom> elements, std::size_t max_arity) {
  DomainDesc domain = DomainDesc::finite(std::move(elements));
  StringSpace space(domain.elements(), max_arity);
  std::vector<CoValue> entries(space.size());
  entries[0] = f.default_value();
  for (std::size_t i = 1; i < space.size(); ++i) entries[i] = f(space.at(i));

  const bool closed = std::all_of(entries.begin(), entries.end(), [&](const CoValue& v) {
    return v.is_epsilon() || domain.contains(v.value());
  });
  DomainDesc codomain = domain;
  if (closed) {
    for (CoValue& v : entries) {
      if (!v.is_epsilon()) v = domain.elements()[*domain.index_of(v.value())];
    }
  } else {
    std::vector<Atom> seen;
    for (const CoValue& v : entries) {
      if (v.is_epsilon()) continue;
      if (std::none_of(seen.begin(), seen.end(), [&](const Atom& a) { return approx_equal(a, v.value()); })) {
        seen.push_back(v.value());
      }
    }
    if (std::all_of(seen.begin(), seen.end(), [](const Atom& a) { return std::holds_alternative<double>(a); })) {
      std::sort(seen.begin(), seen.end(),
                [](const Atom& a, const Atom& b) { return std::get<double>(a) < std::get<double>(b); });
    }
    codomain = DomainDesc::finite(std::move(seen));
  }

  nlohmann::json params = f.params();
  params["tabulated_arity"] = max_arity;
  return VarFn::tabulated(std::move(domain), std::move(codomain), max_arity, std::move(entries), f.name())
      .with_name(f.name(), std::move(params))
      .with_epsilon_standard_claim(f.claims_epsilon_standard());
}

DiagonalSections sections(const VarFn& f, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "sections need a positive arity");
  if (f.max_arity() && n > *f.max_arity()) {
    throw Error(ErrorCode::arity_exceeded,
                "sections at arity " + std::to_string(n) + " exceed max arity " + std::to_string(*f.max_arity()));
  }
  DiagonalSections s;
  s.arity = n;
  s.delta = [f, n](const Atom& x) { return f(Str(n, x)); };
  s.delta_r = [f, n](const Atom& x, const Atom& y) {
    Str str(n - 1, x);
    str.push_back(y);
    return f(str);
  };
  s.delta_l = [f, n](const Atom& x, const Atom& y) {
    Str str(n, y);
    str.front() = x;
    return f(str);
  };
  return s;
}

}  // namespace barylab
