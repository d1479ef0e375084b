#include "barylab/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "barylab/io.hpp"
#include "barylab/sampling.hpp"

namespace barylab {

namespace {

using nlohmann::json;

double num(const Atom& a) { return std::get<double>(a); }

double mean_of(std::span<const Atom> x, const RealMap& f) {
  double acc = 0.0;
  for (const Atom& a : x) acc += f(num(a));
  return acc / static_cast<double>(x.size());
}

/// Quasi-inverse of a diagonal section that is the identity on the domain.
DiagonalInverse identity_inverse(DomainDesc domain) {
  return [domain](std::size_t, const CoValue& y) -> std::optional<Atom> {
    if (y.is_epsilon() || !domain.contains(y.value())) return std::nullopt;
    return y.value();
  };
}

std::optional<Atom> real_in(const DomainDesc& domain, double v) {
  if (!std::isfinite(v) || !domain.contains(Atom{v})) return std::nullopt;
  return Atom{v};
}

VarFn real_fn(std::string name, json params, DomainDesc domain, DomainDesc codomain,
              std::function<double(std::span<const Atom>)> body) {
  return VarFn::closed_form(std::move(name), std::move(params), std::move(domain), std::move(codomain),
                            [body = std::move(body)](std::span<const Atom> x) { return CoValue(body(x)); })
      .with_epsilon_standard_claim(true);
}

}  // namespace

namespace generators {

GeneratorSpec identity() {
  return {"id", Interval::real_line(), [](double x) { return x; }, [](double y) { return y; }, {}, {}};
}

GeneratorSpec log() {
  return {"ln", Interval::positive(), [](double x) { return std::log(x); }, [](double y) { return std::exp(y); },
          {}, {}};
}

GeneratorSpec reciprocal() {
  return {"inv", Interval::positive(), [](double x) { return 1.0 / x; }, [](double y) { return 1.0 / y; }, {}, {}};
}

GeneratorSpec cube() {
  return {"cube", Interval::real_line(), [](double x) { return x * x * x; }, [](double y) { return std::cbrt(y); },
          {}, {}};
}

GeneratorSpec with_scaled_outer(GeneratorSpec g) {
  g.name += "+scale";
  g.outer = [](std::size_t n, double t) { return static_cast<double>(n) * t; };
  g.outer_inv = [](std::size_t n, double y) { return y / static_cast<double>(n); };
  return g;
}

GeneratorSpec with_exp_outer(GeneratorSpec g) {
  g.name += "+exp_scale";
  g.outer = [](std::size_t n, double t) { return std::exp(static_cast<double>(n) * t); };
  g.outer_inv = [](std::size_t n, double y) { return std::log(y) / static_cast<double>(n); };
  return g;
}

GeneratorSpec affine_reparam(const GeneratorSpec& g, double r, double s) {
  if (r == 0.0 || !std::isfinite(r) || !std::isfinite(s)) {
    throw Error(ErrorCode::generator_not_invertible, "affine reparametrization needs a finite nonzero slope");
  }
  GeneratorSpec out;
  out.name = g.name + "*" + std::to_string(r) + "+" + std::to_string(s);
  out.interval = g.interval;
  out.f = [f = g.f, r, s](double x) { return r * f(x) + s; };
  out.f_inv = [f_inv = g.f_inv, r, s](double t) { return f_inv((t - s) / r); };
  out.outer = [g, r, s](std::size_t n, double t) { return g.apply_outer(n, (t - s) / r); };
  out.outer_inv = [g, r, s](std::size_t n, double y) { return r * g.apply_outer_inv(n, y) + s; };
  return out;
}

GeneratorSpec by_name(const std::string& name) {
  if (name == "id" || name == "identity") return identity();
  if (name == "ln" || name == "log") return log();
  if (name == "inv" || name == "reciprocal") return reciprocal();
  if (name == "cube") return cube();
  throw Error(ErrorCode::unknown_name, "unknown generator '" + name + "'");
}

}  // namespace generators

void validate_generator(const GeneratorSpec& g, std::size_t max_arity) {
  if (!g.f || !g.f_inv) throw Error(ErrorCode::generator_not_invertible, g.name + ": missing f or its inverse");
  if (g.outer && !g.outer_inv) {
    throw Error(ErrorCode::generator_not_invertible, g.name + ": outer maps without inverses");
  }
  if (!g.interval.nontrivial()) {
    throw Error(ErrorCode::generator_not_invertible, g.name + ": interval " + g.interval.describe() + " is trivial");
  }
  auto [lo, hi] = sample_window(g.interval);
  std::vector<double> pts;
  for (int i = 1; i < 16; ++i) pts.push_back(lo + (hi - lo) * i / 16.0);

  std::vector<double> images;
  for (double x : pts) {
    const double y = g.f(x);
    if (!std::isfinite(y) || !approx_equal(g.f_inv(y), x, {1e-9, 1e-12})) {
      throw Error(ErrorCode::generator_not_invertible,
                  g.name + ": inverse check failed at x = " + to_string(Atom{x}));
    }
    images.push_back(y);
  }
  const bool up = images[1] > images[0];
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (up ? !(images[i] > images[i - 1]) : !(images[i] < images[i - 1])) {
      throw Error(ErrorCode::generator_not_invertible, g.name + ": f is not strictly monotone on samples");
    }
  }
  if (!g.outer) return;
  const double tlo = *std::min_element(images.begin(), images.end());
  const double thi = *std::max_element(images.begin(), images.end());
  for (std::size_t n = 1; n <= max_arity; ++n) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 16; ++i) {
      const double t = tlo + (thi - tlo) * i / 16.0;
      const double v = g.outer(n, t);
      if (!std::isfinite(v) || !(v > prev) || !approx_equal(g.outer_inv(n, v), t, {1e-9, 1e-12})) {
        throw Error(ErrorCode::generator_not_invertible,
                    g.name + ": outer map at arity " + std::to_string(n) + " is not strictly increasing/invertible");
      }
      prev = v;
    }
  }
}

VarFn quasi_arithmetic(const GeneratorSpec& g) {
  validate_generator(g);
  DomainDesc domain = DomainDesc::interval(g.interval);
  return real_fn("quasi_arithmetic", json{{"f", g.name}}, domain, domain,
                 [g](std::span<const Atom> x) { return g.f_inv(mean_of(x, g.f)); })
      .with_diagonal_inverse(identity_inverse(domain));
}

VarFn pre_mean(const GeneratorSpec& g) {
  validate_generator(g);
  DomainDesc domain = DomainDesc::interval(g.interval);
  return real_fn("pre_mean", json{{"f", g.name}}, domain, DomainDesc::reals(),
                 [g](std::span<const Atom> x) { return g.apply_outer(x.size(), mean_of(x, g.f)); })
      .with_diagonal_inverse([g, domain](std::size_t n, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon()) return std::nullopt;
        const auto* v = std::get_if<double>(&y.value());
        if (!v) return std::nullopt;
        return real_in(domain, g.f_inv(g.apply_outer_inv(n, *v)));
      });
}

double mz_normalizer(double z, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    acc += std::pow(z, static_cast<double>(n - i)) * std::pow(1.0 - z, static_cast<double>(i - 1));
  }
  return acc;
}

VarFn m_z(double z) {
  if (!std::isfinite(z)) throw Error(ErrorCode::invalid_argument, "m_z needs a finite z");
  DomainDesc domain = DomainDesc::reals();
  return real_fn("m_z", json{{"z", z}}, domain, domain,
                 [z](std::span<const Atom> x) {
                   const std::size_t n = x.size();
                   double acc = 0.0;
                   double norm = 0.0;
                   for (std::size_t i = 1; i <= n; ++i) {
                     const double w =
                         std::pow(z, static_cast<double>(n - i)) * std::pow(1.0 - z, static_cast<double>(i - 1));
                     acc += w * num(x[i - 1]);
                     norm += w;
                   }
                   return acc / norm;
                 })
      .with_diagonal_inverse(identity_inverse(domain));
}

SectionCoeffs mz_section_coeffs(double z, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::invalid_argument, "section coefficients start at k = 1");
  double a = z * mz_normalizer(z, k) / mz_normalizer(z, k + 1);
  // Round a onto a grid fine enough to hold a, 1 and 1 - a exactly, so a + b == 1.
  int e = 0;
  std::frexp(std::max({1.0, std::abs(a), std::abs(1.0 - a)}), &e);
  const double q = std::ldexp(1.0, e - 52);
  a = std::nearbyint(a / q) * q;
  return {a, 1.0 - a};
}

VarFn arith_mean() {
  return quasi_arithmetic(generators::identity()).with_name("arith_mean");
}

VarFn geom_mean() {
  DomainDesc domain = DomainDesc::interval(Interval::positive());
  return real_fn("geom_mean", json::object(), domain, domain,
                 [](std::span<const Atom> x) {
                   double acc = 0.0;
                   for (const Atom& a : x) acc += std::log(num(a));
                   return std::exp(acc / static_cast<double>(x.size()));
                 })
      .with_diagonal_inverse(identity_inverse(domain));
}

VarFn harm_mean() {
  return quasi_arithmetic(generators::reciprocal()).with_name("harm_mean");
}

VarFn sum_fn() {
  DomainDesc domain = DomainDesc::reals();
  return real_fn("sum", json::object(), domain, domain,
                 [](std::span<const Atom> x) {
                   double acc = 0.0;
                   for (const Atom& a : x) acc += num(a);
                   return acc;
                 })
      .with_diagonal_inverse([domain](std::size_t n, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon()) return std::nullopt;
        return real_in(domain, y.real() / static_cast<double>(n));
      });
}

VarFn product_fn() {
  DomainDesc domain = DomainDesc::interval(Interval::positive());
  return real_fn("product", json::object(), domain, domain,
                 [](std::span<const Atom> x) {
                   double acc = 1.0;
                   for (const Atom& a : x) acc *= num(a);
                   return acc;
                 })
      .with_diagonal_inverse([domain](std::size_t n, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon() || !(y.real() > 0.0)) return std::nullopt;
        return real_in(domain, std::pow(y.real(), 1.0 / static_cast<double>(n)));
      });
}

VarFn length_fn() {
  return VarFn::closed_form("length_fn", json::object(), DomainDesc::reals(),
                            DomainDesc::interval(Interval::non_negative()),
                            [](std::span<const Atom> x) { return CoValue(static_cast<double>(x.size())); },
                            std::nullopt, CoValue(0.0))
      .with_diagonal_inverse([](std::size_t n, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon() || y.real() != static_cast<double>(n)) return std::nullopt;
        return Atom{0.0};
      });
}

VarFn first_proj() {
  DomainDesc domain = DomainDesc::reals();
  return VarFn::closed_form("first_proj", json::object(), domain, domain,
                            [](std::span<const Atom> x) { return CoValue(x.front()); })
      .with_epsilon_standard_claim(true)
      .with_diagonal_inverse(identity_inverse(domain));
}

VarFn last_proj() {
  DomainDesc domain = DomainDesc::reals();
  return VarFn::closed_form("last_proj", json::object(), domain, domain,
                            [](std::span<const Atom> x) { return CoValue(x.back()); })
      .with_epsilon_standard_claim(true)
      .with_diagonal_inverse(identity_inverse(domain));
}

VarFn max_op() {
  DomainDesc domain = DomainDesc::reals();
  return real_fn("max_op", json::object(), domain, domain,
                 [](std::span<const Atom> x) {
                   double m = num(x.front());
                   for (const Atom& a : x) m = std::max(m, num(a));
                   return m;
                 })
      .with_diagonal_inverse(identity_inverse(domain));
}

VarFn f_a(const Atom& a, DomainDesc domain) {
  if (!domain.contains(a)) throw Error(ErrorCode::domain_mismatch, "F_a: a lies outside the domain");
  std::optional<Atom> other;
  if (domain.is_finite()) {
    for (const Atom& e : domain.elements()) {
      if (!approx_equal(e, a)) {
        other = e;
        break;
      }
    }
  } else if (const auto* d = std::get_if<double>(&a)) {
    other = real_in(domain, *d + 1.0);
    if (!other) other = real_in(domain, *d - 1.0);
  }
  return VarFn::closed_form("F_a", json{{"a", atom_to_json(a)}}, domain, domain,
                            [a](std::span<const Atom> x) {
                              for (const Atom& e : x) {
                                if (approx_equal(e, a)) return CoValue(a);
                              }
                              return CoValue::epsilon();
                            })
      .with_diagonal_inverse([a, other](std::size_t, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon()) return other;
        if (approx_equal(y.value(), a)) return a;
        return std::nullopt;
      });
}

VarFn abs_mean() {
  DomainDesc domain = DomainDesc::reals();
  return real_fn("abs_mean", json::object(), domain, DomainDesc::interval(Interval::non_negative()),
                 [](std::span<const Atom> x) {
                   double acc = 0.0;
                   for (const Atom& a : x) acc += num(a);
                   return std::abs(acc / static_cast<double>(x.size()));
                 })
      .with_diagonal_inverse([](std::size_t, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon() || !(y.real() >= 0.0)) return std::nullopt;
        return Atom{y.real()};
      });
}

VarFn clamped_sum() {
  DomainDesc domain = DomainDesc::reals();
  return real_fn("clamped_sum", json::object(), domain, DomainDesc::interval(Interval::non_negative()),
                 [](std::span<const Atom> x) {
                   double acc = 0.0;
                   for (const Atom& a : x) acc += num(a);
                   return std::max(acc, 0.0);
                 })
      .with_diagonal_inverse([](std::size_t n, const CoValue& y) -> std::optional<Atom> {
        if (y.is_epsilon() || !(y.real() >= 0.0)) return std::nullopt;
        return Atom{y.real() / static_cast<double>(n)};
      });
}

VarFn barycenter(std::size_t dimension) {
  using boost::multiprecision::cpp_rational;
  DomainDesc domain = DomainDesc::vectors(dimension);
  return VarFn::closed_form("barycenter", json{{"d", dimension}}, domain, domain,
                            [dimension](std::span<const Atom> x) {
                              // Every finite double is a dyadic rational, so the sum is exact.
                              Point out(dimension);
                              for (std::size_t k = 0; k < dimension; ++k) {
                                cpp_rational acc = 0;
                                for (const Atom& a : x) acc += cpp_rational(std::get<Point>(a)[k]);
                                acc /= static_cast<long long>(x.size());
                                out[k] = acc.convert_to<double>();
                              }
                              return CoValue(Atom{std::move(out)});
                            })
      .with_epsilon_standard_claim(true)
      .with_diagonal_inverse(identity_inverse(domain));
}

VarFn constant_fn(CoValue c, DomainDesc domain) {
  std::optional<Atom> any;
  if (domain.is_finite()) {
    any = domain.elements().front();
  } else if (domain.kind() == DomainDesc::Kind::vector_space) {
    any = Point(domain.dimension(), 0.0);
  } else {
    auto [lo, hi] = sample_window(domain.interval());
    any = Atom{(lo + hi) / 2.0};
  }
  DomainDesc codomain = domain;
  if (!c.is_epsilon() && !domain.contains(c.value())) codomain = DomainDesc::finite({c.value()});
  return VarFn::closed_form("constant", json{{"c", covalue_to_json(c)}}, domain, codomain,
                            [c](std::span<const Atom>) { return c; })
      .with_diagonal_inverse([c, any](std::size_t, const CoValue& y) -> std::optional<Atom> {
        if (approx_equal(y, c)) return any;
        return std::nullopt;
      });
}

std::vector<std::string> builtin_names() {
  return {"arith_mean", "geom_mean",  "harm_mean",  "sum",         "product",    "length_fn",
          "first_proj", "last_proj",  "max_op",     "F_a",         "abs_mean",   "clamped_sum",
          "barycenter", "m_z",        "quasi_arithmetic", "pre_mean", "constant"};
}

VarFn named_builtin(const std::string& name, const json& params) {
  if (!params.is_object()) throw Error(ErrorCode::format, "builtin parameters must be a JSON object");
  auto number = [&](const char* key, std::optional<double> fallback = std::nullopt) {
    if (!params.contains(key)) {
      if (fallback) return *fallback;
      throw Error(ErrorCode::invalid_argument, name + " needs parameter '" + key + "'");
    }
    if (!params[key].is_number()) throw Error(ErrorCode::format, name + ": parameter '" + key + "' must be a number");
    return params[key].get<double>();
  };
  auto generator = [&] {
    return generators::by_name(params.contains("f") ? params["f"].get<std::string>() : std::string("id"));
  };

  std::optional<std::vector<Atom>> atoms;
  if (params.contains("domain")) {
    if (!params["domain"].is_array()) throw Error(ErrorCode::format, "'domain' must be an array of atoms");
    atoms.emplace();
    for (const json& a : params["domain"]) atoms->push_back(atom_from_json(a));
  }

  VarFn f = [&]() -> VarFn {
    if (name == "arith_mean") return arith_mean();
    if (name == "geom_mean") return geom_mean();
    if (name == "harm_mean") return harm_mean();
    if (name == "sum") return sum_fn();
    if (name == "product") return product_fn();
    if (name == "length_fn") return length_fn();
    if (name == "first_proj") return first_proj();
    if (name == "last_proj") return last_proj();
    if (name == "max_op") return max_op();
    if (name == "abs_mean") return abs_mean();
    if (name == "clamped_sum") return clamped_sum();
    if (name == "m_z") return m_z(number("z"));
    if (name == "barycenter") {
      const double d = number("d", 2.0);
      if (!(d >= 1.0) || d != std::floor(d)) throw Error(ErrorCode::invalid_argument, "barycenter: d must be >= 1");
      return barycenter(static_cast<std::size_t>(d));
    }
    if (name == "F_a") {
      if (!params.contains("a")) throw Error(ErrorCode::invalid_argument, "F_a needs parameter 'a'");
      const Atom a = atom_from_json(params["a"]);
      return atoms ? f_a(a, DomainDesc::finite(*atoms)) : f_a(a);
    }
    if (name == "constant") {
      const CoValue c = params.contains("c") ? covalue_from_json(params["c"]) : CoValue::epsilon();
      return atoms ? constant_fn(c, DomainDesc::finite(*atoms)) : constant_fn(c);
    }
    if (name == "quasi_arithmetic") return quasi_arithmetic(generator());
    if (name == "pre_mean") {
      GeneratorSpec g = generator();
      const std::string outer = params.contains("outer") ? params["outer"].get<std::string>() : "inverse";
      if (outer == "scale") {
        g = generators::with_scaled_outer(g);
      } else if (outer == "exp_scale") {
        g = generators::with_exp_outer(g);
      } else if (outer != "inverse") {
        throw Error(ErrorCode::unknown_name, "unknown outer map family '" + outer + "'");
      }
      return pre_mean(g);
    }
    throw Error(ErrorCode::unknown_name, "unknown builtin '" + name + "'");
  }();

  json recorded = params;
  recorded.erase("domain");
  recorded.erase("max_arity");
  f = f.with_name(name, recorded);
  if (atoms) {
    const double k = number("max_arity", 4.0);
    if (!(k >= 1.0) || k != std::floor(k)) throw Error(ErrorCode::invalid_argument, "max_arity must be >= 1");
    f = tabulate(f, *atoms, static_cast<std::size_t>(k));
  }
  return f;
}

}  // namespace barylab
