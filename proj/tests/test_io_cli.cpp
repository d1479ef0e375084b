#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "barylab/builtins.hpp"
#include "barylab/cli.hpp"
#include "barylab/io.hpp"
#include "barylab/properties.hpp"
#include "support.hpp"

using namespace barylab;

namespace {

struct Run {
  int code;
  std::string out;
};

Run shell(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(BARYLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "barylab_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("atoms, values and strings in JSON") {
  CHECK(atom_from_json(atom_to_json(Atom(2.5))) == Atom(2.5));
  CHECK(atom_from_json(atom_to_json(Atom(std::string("a")))) == Atom(std::string("a")));
  CHECK(atom_from_json(atom_to_json(Atom(Point{1.0, 2.0}))) == Atom(Point{1.0, 2.0}));
  CHECK(covalue_to_json(CoValue::epsilon()) == "epsilon");
  CHECK(covalue_from_json("epsilon").is_epsilon());
  CHECK_THROWS_AS(atom_from_json("epsilon"), Error);
  CHECK(str_to_json(Str{}) == nlohmann::json::array());
  CHECK(str_from_json(nlohmann::json::array({1, 2})) == Str{1.0, 2.0});
}

TEST_CASE("tabulated-function files round-trip") {
  const VarFn t = tabulate(f_a(Atom(1.0), oracle::bits()), {Atom(0.0), Atom(1.0)}, 3);
  const nlohmann::json j = table_to_json(t);
  CHECK(j["max_arity"] == 3);
  CHECK(j["default"] == "epsilon");
  const VarFn back = table_from_json(j);
  for (const Str& s : oracle::strings_upto(t.domain().elements(), 3)) CHECK(back(s) == t(s));
  const auto path = scratch("fa.json");
  save_table_file(t, path);
  const VarFn loaded = load_table_file(path);
  CHECK(table_to_json(loaded) == j);
}

TEST_CASE("malformed table files are format errors") {
  auto expect_format = [](const nlohmann::json& j) {
    try {
      table_from_json(j);
      FAIL("expected Format");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::format);
    }
  };
  nlohmann::json ok = {{"domain", {0, 1}},
                       {"codomain", "same_plus_epsilon"},
                       {"max_arity", 1},
                       {"default", "epsilon"},
                       {"table", {{{"in", {0}}, {"out", 1}}, {{"in", {1}}, {"out", 0}}}}};
  CHECK_NOTHROW(table_from_json(ok));
  nlohmann::json missing = ok;
  missing["table"].erase(1);
  expect_format(missing);
  nlohmann::json conflict = ok;
  conflict["table"].push_back({{"in", {0}}, {"out", 0}});
  expect_format(conflict);
  nlohmann::json outside = ok;
  outside["table"][0]["out"] = 5;
  expect_format(outside);
  expect_format(nlohmann::json{{"domain", {0, 1}}});
  CHECK_THROWS_AS(load_table_file(scratch("does_not_exist.json")), Error);
}

TEST_CASE("report JSON schema and determinism") {
  SearchConfig c;
  c.max_len = 3;
  c.samples = 500;
  const PropertyReport r = check(sum_fn(), PropertyId::b_associative, c);
  const nlohmann::json j = report_to_json(r);
  for (const char* k : {"property", "status", "space", "witness", "seed"}) CHECK(j.contains(k));
  CHECK(j["status"] == "fail");
  for (const char* k : {"x", "y", "y_prime", "z", "lhs", "rhs"}) CHECK(j["witness"].contains(k));
  CHECK_FALSE(j.contains("elapsed_ms"));
  CHECK(report_to_json(r, true).contains("elapsed_ms"));
  CHECK(report_to_json(check(sum_fn(), PropertyId::b_associative, c)).dump() == j.dump());
  CHECK(report_to_json(check(arith_mean(), PropertyId::b_associative, c))["witness"].is_null());
}

TEST_CASE("run() maps outcomes to exit codes") {
  RunConfig cfg;
  cfg.command = "check";
  cfg.fn.name = "sum";
  cfg.props = {"b_preassociative", "b_associative"};
  cfg.search.samples = 500;
  const RunOutcome o = run(cfg);
  CHECK(o.exit_code == exit_fail);
  const auto j = nlohmann::json::parse(o.output);
  CHECK(j["reports"][0]["status"] == "pass");
  CHECK(j["reports"][1]["status"] == "fail");
  CHECK(j["reports"][1]["witness"].is_object());
  CHECK(j["seed"] == kDefaultSeed);

  cfg.fn.name = "nope";
  CHECK(run(cfg).exit_code == exit_usage);
  cfg.fn.name = "sum";
  cfg.props = {"not_a_property"};
  CHECK(run(cfg).exit_code == exit_usage);
  cfg.command = "frobnicate";
  CHECK(run(cfg).exit_code == exit_usage);
}

TEST_CASE("cli: check, eval and exit codes") {
  const Run sum = shell("check --fn sum --props b_preassociative,b_associative --samples 1000");
  CHECK(sum.code == 1);
  const auto j = nlohmann::json::parse(sum.out);
  CHECK(j["reports"][0]["property"] == "b_preassociative");
  CHECK(j["reports"][0]["status"] == "pass");
  CHECK(j["reports"][1]["status"] == "fail");
  CHECK_FALSE(j["reports"][1]["witness"].is_null());

  CHECK(shell("check --fn m_z --z 2 --props b_associative --max-len 6 --samples 1000").code == 0);
  const Run e = shell("eval --fn m_z --z 0.5 --input 1,2,3");
  CHECK(e.code == 0);
  CHECK(e.out == "2\n");
  CHECK(shell("eval --fn sum --input '1,2;3;'").out == "3\n3\nepsilon\n");
  CHECK(shell("eval --fn barycenter --d 2 --input '[[0,0],[2,0]]'").out == "(1 0)\n");

  CHECK(shell("check --fn nope").code == 2);
  CHECK(shell("check --fn sum --props bogus").code == 2);
  CHECK(shell("check").code == 2);
  CHECK(shell("").code == 2);
  CHECK(shell("check --fn sum --max-len zero").code == 2);
  CHECK(shell("check --fn arith_mean --props b_associative", "BARYLAB_BUDGET=20").code == 3);
  CHECK(shell("check --fn arith_mean --props b_associative --samples 200", "BARYLAB_BUDGET=nonsense").code == 2);
  CHECK(shell("enumerate --domain 0,1,2 --max-arity 3 --budget 5").code == 3);
}

TEST_CASE("cli: identical configurations give byte-identical reports") {
  const std::string args = "check --fn clamped_sum --props b_preassociative,b_associative --samples 800 --seed 42";
  const Run a = shell(args), b = shell(args);
  CHECK(a.code == 1);
  CHECK(a.out == b.out);
  const auto path = scratch("report.json");
  std::filesystem::remove(path);
  const Run c = shell(args + " --out " + path.string());
  CHECK(c.code == 1);
  CHECK(c.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == a.out);
  CHECK(nlohmann::json::parse(a.out)["seed"] == 42);
}

TEST_CASE("cli: equiv, factorize, construct, enumerate, probe") {
  const Run eq = shell("equiv --fn max_op --domain 0,1 --max-arity 4");
  CHECK(eq.code == 0);
  CHECK(nlohmann::json::parse(eq.out)["agree"] == true);

  const Run fs = shell("factorize --fn sum --samples 500");
  CHECK(fs.code == 0);
  CHECK(nlohmann::json::parse(fs.out)["verified"] == true);
  const Run fa = shell("factorize --fn abs_mean --samples 500");
  CHECK(fa.code == 1);
  CHECK(nlohmann::json::parse(fa.out)["error"] == "NotBPreassociative");
  const Run ft = shell("factorize --fn max_op --domain 0,1 --max-arity 3");
  CHECK(ft.code == 0);
  CHECK(nlohmann::json::parse(ft.out)["inner"].contains("table"));

  const Run cz = shell("construct --z 2 --max-arity 5 --samples 500");
  CHECK(cz.code == 0);
  CHECK(nlohmann::json::parse(cz.out)["construction"]["status"] == "ok");
  CHECK(shell("construct --fn max_op --domain 0,1,2 --max-arity 3 --side l").code == 0);
  CHECK(shell("construct --fn arith_mean --tail-cutoff 2 --tail-constant 0 --samples 500").code == 0);
  const Run ts = shell("construct --fn sum --tail-cutoff 2 --tail-constant 0 --samples 500");
  CHECK(ts.code == 1);
  CHECK(nlohmann::json::parse(ts.out)["cross_check"].is_null());

  const auto dir = scratch("tables");
  std::filesystem::remove_all(dir);
  const Run en = shell("enumerate --domain 0,1 --max-arity 2 --tables-dir " + dir.string());
  CHECK(en.code == 0);
  const auto census = nlohmann::json::parse(en.out)["census"];
  CHECK(census["total"] == 64);
  CHECK(census["b_associative"] == 10);
  CHECK(census["examples"].size() == 10);
  const VarFn first = load_table_file(census["examples"][0].get<std::string>());
  CHECK(oracle::b_associative(first, 2));

  for (const char* p : {"a", "b", "divisibility"}) {
    const Run pr = shell(std::string("probe --problem ") + p + " --domain 0,1 --max-arity 2");
    CHECK(pr.code == 0);
    CHECK(nlohmann::json::parse(pr.out)["probe"]["examined"] == 10);
  }
  CHECK(shell("probe --problem z --domain 0,1").code == 2);
}
