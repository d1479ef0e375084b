#include "barylab/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "barylab/builtins.hpp"
#include "barylab/construct.hpp"
#include "barylab/factorization.hpp"
#include "barylab/io.hpp"
#include "barylab/properties.hpp"

namespace barylab {

namespace {

VarFn load_function(const FunctionSource& s) {
  if (!s.table_path.empty()) return load_table_file(s.table_path);
  if (s.name.empty()) throw Error(ErrorCode::invalid_argument, "no function given (use --fn or --table)");
  return named_builtin(s.name, s.params);
}

json describe(const FunctionSource& s) {
  if (!s.table_path.empty()) return json{{"table", s.table_path}};
  return json{{"name", s.name}, {"params", s.params}};
}

json header(const RunConfig& cfg) {
  json j{{"command", cfg.command}, {"seed", cfg.search.seed}};
  if (!cfg.fn.empty()) j["function"] = describe(cfg.fn);
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// budget > fail > unsupported > pass
int combine(int acc, const PropertyReport& r) {
  if (r.budget_exceeded || acc == exit_budget) return exit_budget;
  if (r.failed() || acc == exit_fail) return exit_fail;
  if (r.status == Status::unsupported) return exit_usage;
  return acc;
}

std::string number_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string atom_text(const Atom& a) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return number_text(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else {
          std::string out = "(";
          for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + number_text(v[i]);
          return out + ")";
        }
      },
      a);
}

std::vector<Str> parse_inputs(const std::string& text) {
  std::vector<Str> out;
  const auto first = text.find_first_not_of(" \t");
  if (first != std::string::npos && text[first] == '[') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::format, std::string("--input: ") + e.what());
    }
    if (!j.is_array()) throw Error(ErrorCode::format, "--input must be a JSON array");
    // a flat array of atoms is one string; an array of arrays is several
    const bool nested = !j.empty() && j.front().is_array() && !(j.front().empty() || j.front().front().is_number());
    if (nested) {
      for (const json& s : j) out.push_back(str_from_json(s));
    } else {
      out.push_back(str_from_json(j));
    }
    return out;
  }
  for (std::size_t start = 0;;) {
    const std::size_t stop = text.find(';', start);
    const std::string chunk = text.substr(start, stop == std::string::npos ? std::string::npos : stop - start);
    Str s;
    std::stringstream one(chunk);
    std::string tok;
    while (std::getline(one, tok, ',')) {
      const auto b = tok.find_first_not_of(" \t"), e = tok.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      tok = tok.substr(b, e - b + 1);
      double v = 0.0;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec == std::errc() && res.ptr == tok.data() + tok.size()) {
        s.emplace_back(v);
      } else {
        if (tok == "epsilon") throw Error(ErrorCode::format, "'epsilon' is not an atom");
        s.emplace_back(tok);
      }
    }
    out.push_back(std::move(s));
    if (stop == std::string::npos) break;
    start = stop + 1;
  }
  return out;
}

json finite_map_json(const FiniteMap& m) {
  json j{{"domain", json::array()}, {"image", json::array()}};
  for (std::size_t i = 0; i < m.domain.size(); ++i) {
    j["domain"].push_back(covalue_to_json(m.domain[i]));
    j["image"].push_back(covalue_to_json(m.codomain[m.image[i]]));
  }
  return j;
}

DomainDesc finite_domain(const json& atoms) {
  if (!atoms.is_array() || atoms.empty()) throw Error(ErrorCode::invalid_argument, "--domain needs a list of atoms");
  std::vector<Atom> xs;
  for (const json& a : atoms) xs.push_back(atom_from_json(a));
  return DomainDesc::finite(std::move(xs));
}

// ---------------------------------------------------------------------------

RunOutcome cmd_check(const RunConfig& cfg) {
  const VarFn f = load_function(cfg.fn);
  std::vector<std::string> props = cfg.props;
  if (props.empty()) props.push_back("b_associative");
  json out = header(cfg);
  out["reports"] = json::array();
  int code = exit_pass;
  for (const std::string& name : props) {
    auto p = parse_property(name);
    if (!p) throw Error(ErrorCode::unknown_name, "unknown property '" + name + "'");
    const PropertyReport r = check(f, *p, cfg.search);
    code = combine(code, r);
    out["reports"].push_back(report_to_json(r));
  }
  return {code, dump(out)};
}

RunOutcome cmd_equiv(const RunConfig& cfg) {
  const VarFn f = load_function(cfg.fn);
  json out = header(cfg);
  out["relations"] = json::array();
  const auto outcomes = check_equivalence_suite(f, cfg.search);
  for (const auto& o : outcomes) {
    json verdicts = json::object();
    for (const auto& [name, st] : o.verdicts) verdicts[name] = std::string(to_string(st));
    json rel{{"relation", o.relation}, {"agree", o.agree}, {"verdicts", verdicts}};
    if (!o.detail.empty()) rel["detail"] = o.detail;
    out["relations"].push_back(rel);
  }
  const bool ok = all_agree(outcomes);
  out["agree"] = ok;
  return {ok ? exit_pass : exit_fail, dump(out)};
}

RunOutcome cmd_factorize(const RunConfig& cfg) {
  const VarFn f = load_function(cfg.fn);
  json out = header(cfg);
  try {
    const FactorizationResult res = factorize(f, cfg.search);
    out["convention"] = res.convention;
    out["verified"] = res.verified();
    out["checks"] = json::array();
    int code = exit_pass;
    for (const auto& c : res.checks) {
      out["checks"].push_back(report_to_json(c));
      code = combine(code, c);
    }
    if (res.inner.is_tabulated()) {
      out["inner"] = table_to_json(res.inner);
    } else {
      json samples = json::array();
      const std::size_t top = std::min<std::size_t>(effective_max_len(f, cfg.search), 3);
      for (std::size_t n = 1; n <= top; ++n) {
        const auto strings = probe_strings(f.domain(), n, cfg.search, 0);
        for (std::size_t i = 0; i < std::min<std::size_t>(strings.size(), 3); ++i) {
          const Str& s = strings[i * (strings.size() / 3 ? strings.size() / 3 : 1) % strings.size()];
          const CoValue h = res.inner(s);
          json row{{"in", str_to_json(s)}, {"inner", covalue_to_json(h)}, {"value", covalue_to_json(f(s))}};
          if (!h.is_epsilon() && n <= res.outer.size()) row["outer_of_inner"] = covalue_to_json(res.outer[n - 1].apply(h.value()));
          samples.push_back(row);
        }
      }
      out["inner"] = json{{"name", res.inner.name()}, {"samples", samples}};
    }
    out["outer"] = json::array();
    for (const auto& o : res.outer) {
      json j{{"arity", o.arity}, {"description", o.description}};
      if (o.table) j["table"] = finite_map_json(*o.table);
      out["outer"].push_back(j);
    }
    if (!res.verified() && code == exit_pass) code = exit_fail;
    return {code, dump(out)};
  } catch (const FactorizationError& e) {
    out["verified"] = false;
    out["error"] = std::string(to_string(e.code()));
    out["message"] = e.what();
    out["report"] = report_to_json(e.report());
    return {e.report().budget_exceeded ? exit_budget : exit_fail, dump(out)};
  }
}

RunOutcome cmd_construct(const RunConfig& cfg) {
  json out = header(cfg);
  if (cfg.tail_cutoff) {
    if (cfg.fn.empty()) throw Error(ErrorCode::invalid_argument, "--tail-cutoff needs a base function");
    if (cfg.tail_constant.is_null()) throw Error(ErrorCode::invalid_argument, "--tail-cutoff needs --tail-constant");
    const Atom c = atom_from_json(cfg.tail_constant);
    const ConstantTailResult r = constant_tail({load_function(cfg.fn), *cfg.tail_cutoff, [c](std::size_t) { return c; }},
                                               cfg.search);
    out["mode"] = "constant_tail";
    out["cutoff"] = *cfg.tail_cutoff;
    out["constant"] = atom_to_json(c);
    out["precondition"] = report_to_json(r.precondition);
    out["cross_check"] = r.cross_check ? report_to_json(*r.cross_check) : json(nullptr);
    if (r.precondition.budget_exceeded || (r.cross_check && r.cross_check->budget_exceeded)) return {exit_budget, dump(out)};
    return {r.ok() ? exit_pass : exit_fail, dump(out)};
  }

  SectionSpec spec;
  if (cfg.sections_z) {
    spec = mz_section_spec(*cfg.sections_z);
    out["mode"] = "mz_sections";
    out["z"] = *cfg.sections_z;
  } else {
    if (cfg.fn.empty()) throw Error(ErrorCode::invalid_argument, "construct needs --z or a function to take sections from");
    if (cfg.side != "r" && cfg.side != "l") throw Error(ErrorCode::invalid_argument, "--side must be r or l");
    const SectionSide side = cfg.side == "r" ? SectionSide::r : SectionSide::l;
    spec = section_spec_of(load_function(cfg.fn), [side](std::size_t) { return side; });
    out["mode"] = "sections_of_function";
    out["side"] = cfg.side;
  }
  out["max_arity"] = cfg.max_arity;
  const Construction c = from_sections(spec, cfg.max_arity, cfg.search);
  out["construction"] = construction_to_json(c);
  if (!c.ok()) return {exit_fail, dump(out)};
  SearchConfig bound = cfg.search;
  bound.max_len = cfg.max_arity;
  const PropertyReport r = check(*c.function, PropertyId::b_associative, bound);
  out["check"] = report_to_json(r);
  return {combine(exit_pass, r), dump(out)};
}

EnumerationFilter parse_filter(const std::vector<std::string>& names) {
  EnumerationFilter f;
  for (const auto& n : names) {
    if (n == "associative") {
      f.associative = true;
    } else if (n == "idempotent") {
      f.idempotent = true;
    } else {
      throw Error(ErrorCode::unknown_name, "unknown filter '" + n + "'");
    }
  }
  return f;
}

RunOutcome cmd_enumerate(const RunConfig& cfg) {
  const DomainDesc X = finite_domain(cfg.domain);
  json out = header(cfg);
  try {
    Enumeration e = enumerate_b_associative(X, cfg.max_arity, parse_filter(cfg.filter), cfg.search);
    if (!cfg.tables_dir.empty()) {
      std::filesystem::create_directories(cfg.tables_dir);
      e.census.examples.clear();
      for (const VarFn& op : e.operations) {
        const auto path = std::filesystem::path(cfg.tables_dir) / (op.name() + ".json");
        save_table_file(op, path);
        e.census.examples.push_back(path.string());
      }
    }
    out["census"] = census_to_json(e.census);
    out["yielded"] = e.operations.size();
    return {exit_pass, dump(out)};
  } catch (const Error& err) {
    if (err.code() != ErrorCode::budget_exceeded) throw;
    out["error"] = std::string(to_string(err.code()));
    out["message"] = err.what();
    return {exit_budget, dump(out)};
  }
}

RunOutcome cmd_probe(const RunConfig& cfg) {
  const DomainDesc X = finite_domain(cfg.domain);
  OpenProblem p;
  if (cfg.problem == "a") {
    p = OpenProblem::a;
  } else if (cfg.problem == "b") {
    p = OpenProblem::b;
  } else if (cfg.problem == "divisibility") {
    p = OpenProblem::divisibility;
  } else {
    throw Error(ErrorCode::unknown_name, "--problem must be a, b or divisibility");
  }
  json out = header(cfg);
  try {
    const ProbeReport r = probe_open_problems(p, X, cfg.max_arity, cfg.search);
    out["probe"] = probe_to_json(r);
    // an open-problem counterexample is a finding; only a broken proved implication fails the run
    return {r.critical ? exit_fail : exit_pass, dump(out)};
  } catch (const Error& err) {
    if (err.code() != ErrorCode::budget_exceeded) throw;
    out["error"] = std::string(to_string(err.code()));
    out["message"] = err.what();
    return {exit_budget, dump(out)};
  }
}

RunOutcome cmd_eval(const RunConfig& cfg) {
  const VarFn f = load_function(cfg.fn);
  std::string text;
  for (const Str& s : parse_inputs(cfg.input)) {
    const CoValue v = f(s);
    text += v.is_epsilon() ? std::string("epsilon") : atom_text(v.value());
    text += "\n";
  }
  return {exit_pass, text};
}

}  // namespace

RunOutcome run(const RunConfig& cfg) {
  try {
    if (cfg.command == "check") return cmd_check(cfg);
    if (cfg.command == "equiv") return cmd_equiv(cfg);
    if (cfg.command == "factorize") return cmd_factorize(cfg);
    if (cfg.command == "construct") return cmd_construct(cfg);
    if (cfg.command == "enumerate") return cmd_enumerate(cfg);
    if (cfg.command == "probe") return cmd_probe(cfg);
    if (cfg.command == "eval") return cmd_eval(cfg);
    throw Error(ErrorCode::unknown_name, "unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    const json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    return {e.code() == ErrorCode::budget_exceeded ? exit_budget : exit_usage, dump(j)};
  } catch (const BudgetExhausted&) {
    const json j{{"error", "budget_exceeded"}, {"message", "evaluation budget exhausted"}};
    return {exit_budget, dump(j)};
  } catch (const std::filesystem::filesystem_error& e) {
    const json j{{"error", "io"}, {"message", e.what()}};
    return {exit_usage, dump(j)};
  }
}

int run_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"barylab: checks, factorizations and constructions for variadic functions"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<double> z, a, d;
  std::string f_name, outer, props, filter, domain;
  std::optional<std::uint64_t> budget;
  std::optional<std::size_t> max_arity;
  std::string tail_constant;

  auto add_function = [&](CLI::App* sub) {
    sub->add_option("--fn", cfg.fn.name, "builtin function name");
    sub->add_option("--table", cfg.fn.table_path, "tabulated function file");
    sub->add_option("--z", z, "parameter z of m_z");
    sub->add_option("--a", a, "parameter a of F_a");
    sub->add_option("--d", d, "dimension of barycenter");
    sub->add_option("--f", f_name, "generator: id, ln, inv, cube");
    sub->add_option("--outer", outer, "outer maps of pre_mean: inverse, scale, exp_scale");
  };
  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--max-len", cfg.search.max_len, "longest string examined")->check(CLI::PositiveNumber);
    sub->add_option("--samples", cfg.search.samples, "random instances on numeric domains");
    sub->add_option("--seed", cfg.search.seed, "random seed");
    sub->add_option("--budget", budget, "evaluation budget");
    sub->add_option("--jobs", cfg.search.jobs, "worker cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.output_path, "write the report to this file");
  };
  auto add_domain = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--domain", domain, "comma-separated atoms of a finite domain");
    if (required) o->required();
    sub->add_option("--max-arity", max_arity, "largest arity")->check(CLI::PositiveNumber);
  };

  auto* check_cmd = app.add_subcommand("check", "check properties");
  add_function(check_cmd);
  add_search(check_cmd);
  add_domain(check_cmd, false);
  check_cmd->add_option("--props", props, "comma-separated properties");

  auto* equiv_cmd = app.add_subcommand("equiv", "compare verdicts of equivalent characterizations");
  add_function(equiv_cmd);
  add_search(equiv_cmd);
  add_domain(equiv_cmd, false);

  auto* fact_cmd = app.add_subcommand("factorize", "factor F_n = f_n o H_n");
  add_function(fact_cmd);
  add_search(fact_cmd);
  add_domain(fact_cmd, false);

  auto* cons_cmd = app.add_subcommand("construct", "build from sections or with a constant tail");
  add_function(cons_cmd);
  add_search(cons_cmd);
  add_domain(cons_cmd, false);
  cons_cmd->add_option("--side", cfg.side, "section side r or l");
  cons_cmd->add_option("--tail-cutoff", cfg.tail_cutoff, "keep the base up to this arity");
  cons_cmd->add_option("--tail-constant", tail_constant, "constant value beyond the cutoff");

  auto* enum_cmd = app.add_subcommand("enumerate", "enumerate B-associative tables");
  add_search(enum_cmd);
  add_domain(enum_cmd, true);
  enum_cmd->add_option("--filter", filter, "associative,idempotent");
  enum_cmd->add_option("--tables-dir", cfg.tables_dir, "write each yielded table here");

  auto* probe_cmd = app.add_subcommand("probe", "bounded open-problem search");
  add_search(probe_cmd);
  add_domain(probe_cmd, true);
  probe_cmd->add_option("--problem", cfg.problem, "a, b or divisibility")->required();

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a function");
  add_function(eval_cmd);
  add_domain(eval_cmd, false);
  eval_cmd->add_option("--input", cfg.input, "atoms separated by ',', strings by ';'")->required();
  eval_cmd->add_option("--out", cfg.output_path, "write the values to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return exit_usage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (const char* env = std::getenv("BARYLAB_BUDGET"); env && !budget) {
    std::uint64_t v = 0;
    const std::string s(env);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v == 0) {
      err << "BARYLAB_BUDGET must be a positive integer\n";
      return exit_usage;
    }
    cfg.search.budget = v;
  }
  if (budget) cfg.search.budget = *budget;

  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ',')) {
      if (!p.empty()) parts.push_back(p);
    }
    return parts;
  };
  // property names such as symmetric(3) contain no commas, so a plain split suffices
  cfg.props = split(props);
  cfg.filter = split(filter);
  if (!domain.empty()) {
    try {
      for (const Str& s : parse_inputs(domain)) {
        for (const Atom& x : s) cfg.domain.push_back(atom_to_json(x));
      }
    } catch (const Error& e) {
      err << e.what() << "\n";
      return exit_usage;
    }
  }
  if (max_arity) cfg.max_arity = *max_arity;
  if (!tail_constant.empty()) {
    try {
      cfg.tail_constant = json::parse(tail_constant);
    } catch (const json::exception&) {
      cfg.tail_constant = tail_constant;
    }
  }
  if (cfg.command == "construct" && cfg.fn.empty()) {
    cfg.sections_z = z;
    z.reset();
  }
  if (z) cfg.fn.params["z"] = *z;
  if (a) cfg.fn.params["a"] = *a;
  if (d) cfg.fn.params["d"] = *d;
  if (!f_name.empty()) cfg.fn.params["f"] = f_name;
  if (!outer.empty()) cfg.fn.params["outer"] = outer;
  if (!cfg.fn.name.empty() && !cfg.domain.empty() && cfg.command != "enumerate" && cfg.command != "probe") {
    cfg.fn.params["domain"] = cfg.domain;
    if (max_arity) cfg.fn.params["max_arity"] = *max_arity;
  }

  const RunOutcome result = run(cfg);
  if (cfg.output_path.empty()) {
    out << result.output;
  } else {
    std::ofstream file(cfg.output_path, std::ios::binary);
    if (!file) {
      err << "cannot write " << cfg.output_path << "\n";
      return exit_usage;
    }
    file << result.output;
  }
  if (result.exit_code == exit_usage && result.output.rfind("{\n  \"error\"", 0) == 0) err << result.output;
  return result.exit_code;
}

}  // namespace barylab
