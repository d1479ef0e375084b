#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "barylab/builtins.hpp"
#include "barylab/cli.hpp"
#include "barylab/io.hpp"
#include "barylab/properties.hpp"

namespace py = pybind11;
using namespace barylab;

namespace {

SearchConfig search_from(const json& o) {
  SearchConfig c;
  c.max_len = o.value("max_len", c.max_len);
  c.samples = o.value("samples", c.samples);
  c.seed = o.value("seed", c.seed);
  c.budget = o.value("budget", c.budget);
  c.jobs = o.value("jobs", c.jobs);
  return c;
}

VarFn function_from(const json& o) {
  if (o.contains("table")) return table_from_json(o.at("table"));
  return named_builtin(o.at("name").get<std::string>(), o.value("params", json::object()));
}

// Every entry point takes and returns JSON text; the Python package decodes it.
std::pair<int, std::string> run_json(const std::string& command, const std::string& options) {
  const json o = json::parse(options);
  RunConfig cfg;
  cfg.command = command;
  cfg.search = search_from(o);
  if (o.contains("name")) cfg.fn.name = o["name"].get<std::string>();
  if (o.contains("params")) cfg.fn.params = o["params"];
  if (o.contains("table_path")) cfg.fn.table_path = o["table_path"].get<std::string>();
  if (o.contains("props")) cfg.props = o["props"].get<std::vector<std::string>>();
  if (o.contains("input")) cfg.input = o["input"].is_string() ? o["input"].get<std::string>() : o["input"].dump();
  if (o.contains("z")) cfg.sections_z = o["z"].get<double>();
  cfg.side = o.value("side", cfg.side);
  cfg.max_arity = o.value("max_arity", cfg.max_arity);
  if (o.contains("tail_cutoff")) cfg.tail_cutoff = o["tail_cutoff"].get<std::size_t>();
  if (o.contains("tail_constant")) cfg.tail_constant = o["tail_constant"];
  if (o.contains("domain")) cfg.domain = o["domain"];
  if (o.contains("filter")) cfg.filter = o["filter"].get<std::vector<std::string>>();
  cfg.tables_dir = o.value("tables_dir", std::string());
  cfg.problem = o.value("problem", std::string());
  const RunOutcome r = run(cfg);
  return {r.exit_code, r.output};
}

std::string evaluate_json(const std::string& function, const std::string& strings) {
  const VarFn f = function_from(json::parse(function));
  json out = json::array();
  for (const json& s : json::parse(strings)) out.push_back(covalue_to_json(f(str_from_json(s))));
  return out.dump();
}

std::string check_json(const std::string& function, const std::string& property, const std::string& options) {
  const auto p = parse_property(property);
  if (!p) throw Error(ErrorCode::unknown_name, "unknown property '" + property + "'");
  return report_to_json(check(function_from(json::parse(function)), *p, search_from(json::parse(options)))).dump();
}

}  // namespace

PYBIND11_MODULE(_barylab, m) {
  m.doc() = "Native core of barylab";
  py::register_exception<Error>(m, "BarylabError", PyExc_ValueError);
  m.def("run_json", &run_json, py::arg("command"), py::arg("options"));
  m.def("evaluate_json", &evaluate_json, py::arg("function"), py::arg("strings"));
  m.def("check_json", &check_json, py::arg("function"), py::arg("property"), py::arg("options"));
  m.def("builtin_names", &builtin_names);
  m.def(
      "mz_section_coeffs",
      [](double z, std::size_t k) {
        const SectionCoeffs c = mz_section_coeffs(z, k);
        return std::make_pair(c.a, c.b);
      },
      py::arg("z"), py::arg("k"));
  m.attr("default_seed") = kDefaultSeed;
}
