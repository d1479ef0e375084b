#include "barylab/io.hpp"

#include <fstream>

namespace barylab {

json atom_to_json(const Atom& a) {
  if (const auto* d = std::get_if<double>(&a)) return *d;
  if (const auto* s = std::get_if<std::string>(&a)) return *s;
  return std::get<Point>(a);
}

Atom atom_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "epsilon") throw Error(ErrorCode::format, "\"epsilon\" is not an atom");
    return s;
  }
  if (j.is_array()) {
    Point p;
    for (const json& c : j) {
      if (!c.is_number()) throw Error(ErrorCode::format, "point coordinates must be numbers: " + j.dump());
      p.push_back(c.get<double>());
    }
    if (p.empty()) throw Error(ErrorCode::format, "empty point");
    return p;
  }
  throw Error(ErrorCode::format, "not an atom: " + j.dump());
}

json covalue_to_json(const CoValue& v) { return v.is_epsilon() ? json("epsilon") : atom_to_json(v.value()); }

CoValue covalue_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "epsilon") return CoValue::epsilon();
  return atom_from_json(j);
}

json str_to_json(std::span<const Atom> s) {
  json out = json::array();
  for (const Atom& a : s) out.push_back(atom_to_json(a));
  return out;
}

Str str_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::format, "a string must be an array of atoms: " + j.dump());
  Str s;
  for (const json& a : j) s.push_back(atom_from_json(a));
  return s;
}

json domain_to_json(const DomainDesc& d) {
  switch (d.kind()) {
    case DomainDesc::Kind::finite: return json{{"kind", "finite"}, {"elements", str_to_json(d.elements())}};
    case DomainDesc::Kind::real_interval: {
      const Interval& iv = d.interval();
      auto end = [](double v) { return std::isfinite(v) ? json(v) : json(v < 0 ? "-inf" : "inf"); };
      return json{{"kind", "real_interval"}, {"lo", end(iv.lo)},          {"hi", end(iv.hi)},
                  {"lo_closed", iv.lo_closed}, {"hi_closed", iv.hi_closed}};
    }
    case DomainDesc::Kind::vector_space: return json{{"kind", "vector_space"}, {"dimension", d.dimension()}};
  }
  return nullptr;
}

json table_to_json(const VarFn& f) {
  if (!f.is_tabulated()) throw Error(ErrorCode::unsupported, f.name() + " is not tabulated");
  const std::size_t k = *f.max_arity();
  StringSpace space(f.domain().elements(), k);
  json j;
  j["domain"] = str_to_json(f.domain().elements());
  j["codomain"] = f.codomain() == f.domain() ? json("same_plus_epsilon") : str_to_json(f.codomain().elements());
  j["max_arity"] = k;
  j["default"] = covalue_to_json(f.default_value());
  json rows = json::array();
  const auto& entries = f.table_entries();
  for (std::size_t i = 1; i < space.size(); ++i) {
    rows.push_back(json{{"in", str_to_json(space.at(i))}, {"out", covalue_to_json(entries[i])}});
  }
  j["table"] = std::move(rows);
  return j;
}

VarFn table_from_json(const json& j) {
  try {
    for (const char* key : {"domain", "max_arity", "table"}) {
      if (!j.contains(key)) throw Error(ErrorCode::format, std::string("table file lacks \"") + key + "\"");
    }
    DomainDesc domain = DomainDesc::finite(str_from_json(j.at("domain")));
    DomainDesc codomain = domain;
    if (j.contains("codomain") && !(j["codomain"].is_string() && j["codomain"] == "same_plus_epsilon")) {
      codomain = DomainDesc::finite(str_from_json(j["codomain"]));
    }
    const auto k = j.at("max_arity").get<std::size_t>();
    if (k == 0) throw Error(ErrorCode::format, "max_arity must be positive");
    StringSpace space(domain.elements(), k);
    std::vector<std::optional<CoValue>> entries(space.size());
    entries[0] = j.contains("default") ? covalue_from_json(j["default"]) : CoValue::epsilon();
    for (const json& row : j.at("table")) {
      Str in = str_from_json(row.at("in"));
      if (in.size() > k) throw Error(ErrorCode::format, "row " + row.dump() + " is longer than max_arity");
      for (Atom& a : in) {
        auto idx = domain.index_of(a);
        if (!idx) throw Error(ErrorCode::format, "row " + row.dump() + " uses an atom outside the domain");
        a = domain.elements()[*idx];
      }
      const std::size_t i = *space.index_of(in);
      CoValue out = covalue_from_json(row.at("out"));
      if (entries[i] && !(i == 0 && !j.contains("default")) && !approx_equal(*entries[i], out)) {
        throw Error(ErrorCode::format, "conflicting rows for " + to_string(in));
      }
      entries[i] = std::move(out);
    }
    std::vector<CoValue> values;
    values.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!entries[i]) throw Error(ErrorCode::format, "table is not total: missing " + to_string(space.at(i)));
      values.push_back(std::move(*entries[i]));
    }
    for (CoValue& v : values) {
      if (!v.is_epsilon() && codomain.is_finite()) {
        if (auto idx = codomain.index_of(v.value())) v = codomain.elements()[*idx];
      }
    }
    return VarFn::tabulated(std::move(domain), std::move(codomain), k, std::move(values));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("malformed table file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::domain_mismatch || e.code() == ErrorCode::invalid_argument ||
        e.code() == ErrorCode::empty_domain) {
      throw Error(ErrorCode::format, e.what());
    }
    throw;
  }
}

VarFn load_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::format, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, path.string() + ": " + e.what());
  }
  return table_from_json(j).with_name(path.stem().string(), json{{"file", path.string()}});
}

void save_table_file(const VarFn& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::format, "cannot write " + path.string());
  out << table_to_json(f).dump(2) << '\n';
}

json witness_to_json(const Witness& w) {
  json j{{"x", str_to_json(w.x)}, {"y", str_to_json(w.y)}, {"y_prime", str_to_json(w.y_prime)},
         {"z", str_to_json(w.z)}};
  if (w.x_prime) j["x_prime"] = str_to_json(*w.x_prime);
  if (w.z_prime) j["z_prime"] = str_to_json(*w.z_prime);
  j["lhs"] = w.lhs ? covalue_to_json(*w.lhs) : json("undefined");
  j["rhs"] = w.rhs ? covalue_to_json(*w.rhs) : json("undefined");
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

json report_to_json(const PropertyReport& r, bool with_timing) {
  json j;
  j["property"] = r.property;
  j["status"] = std::string(to_string(r.status));
  j["space"] = json{{"mode", std::string(to_string(r.space.mode))},
                    {"max_len", r.space.max_len},
                    {"alphabet_size", r.space.alphabet_size},
                    {"samples", r.space.samples},
                    {"instances", r.space.instances}};
  j["witness"] = r.witness ? witness_to_json(*r.witness) : json(nullptr);
  j["seed"] = r.space.seed;
  if (!r.note.empty()) j["note"] = r.note;
  if (r.critical) j["critical"] = true;
  if (r.vacuous) j["vacuous"] = true;
  if (r.budget_exceeded) j["budget_exceeded"] = true;
  if (with_timing) j["elapsed_ms"] = std::chrono::duration<double, std::milli>(r.elapsed).count();
  return j;
}

}  // namespace barylab
