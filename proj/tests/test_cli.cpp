#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "twolink/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "twolink");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = twolink::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("twolink_test_" + name)).string();
}

}  // namespace

TEST_CASE("cli: knots poly") {
  auto r = cli({"knots", "poly", "2: s1^3"});
  CHECK(r.code == 0);
  CHECK(r.out == "t - 1 + t^-1\n");
  r = cli({"knots", "poly", "3: s1 s2^-1 s1 s2^-1"});
  CHECK(r.out == "-t + 3 - t^-1\n");
  r = cli({"knots", "poly", "2: s7"});
  CHECK(r.code == 2);
  CHECK(r.err.find("braid grammar") != std::string::npos);
}

TEST_CASE("cli: knots family is JSON") {
  const auto r = cli({"knots", "family", "twist:0..3"});
  REQUIRE(r.code == 0);
  const auto j = twolink::Json::parse(r.out);
  CHECK(j.size() == 4);
  CHECK(j[2]["alexander"] == "-t + 3 - t^-1");
}

TEST_CASE("cli: usage errors exit 2, help exits 0") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"recipe", "run", "--group", "free:2"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"blocks", "CP2"}).code == 2);
}

TEST_CASE("cli: blocks") {
  const auto r = cli({"blocks", "N", "--g", "2"});
  REQUIRE(r.code == 0);
  const auto rec = twolink::record_from_json(twolink::Json::parse(r.out));
  CHECK(rec.has_mark("gamma'_2"));
}

TEST_CASE("cli: recipe run, verify-trace and report render") {
  const auto out = temp_path("report.json");
  auto r = cli({"recipe", "run", "--spec", oracle::fixture("e2.json"), "--group", "free:1", "--knots", "twist:0..2",
                "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  r = cli({"verify-trace", out});
  CHECK(r.code == 0);
  CHECK(r.out.find("byte-identical") != std::string::npos);
  r = cli({"verify-trace", out, "--step", "2"});
  CHECK(r.code == 0);
  r = cli({"report", "render", out});
  CHECK(r.code == 0);
  CHECK(r.out.find("SW comparison: 3 distinct") != std::string::npos);
  std::filesystem::remove(out);
}

TEST_CASE("cli: recipe exit codes") {
  auto r = cli({"recipe", "run", "--spec", "/nonexistent/spec.json", "--group", "free:2", "--knots", "twist:0..2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("cannot read") != std::string::npos);
  r = cli({"recipe", "run", "--spec", oracle::fixture("bad_definite.json"), "--group", "free:1", "--knots", "twist:0..1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("indefinite intersection form") != std::string::npos);
  r = cli({"recipe", "run", "--spec", oracle::fixture("e2.json"), "--group", "free:1", "--knots", "list:1: ;2: s1^3;2: s1^3"});
  CHECK(r.code == 1);
  CHECK(twolink::Json::parse(r.out).at("all_computed_pass") == false);
  r = cli({"recipe", "run", "--spec", oracle::fixture("e2.json"), "--group", "free:1", "--knots", "twist:0..1",
           "--compare", "sideways"});
  CHECK(r.code == 2);
}

TEST_CASE("cli: verify lemmas") {
  auto r = cli({"verify", "lemmas", "--gmax", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("all lemma checks passed") != std::string::npos);
  r = cli({"verify", "lemmas", "--gmax", "1", "--json"});
  CHECK(twolink::Json::parse(r.out).at("all_pass") == true);
  r = cli({"verify", "lemmas", "--gmax", "1", "--corrupt-relator"});
  CHECK(r.code == 1);
}

TEST_CASE("cli: Tietze budget from the environment and the flag") {
  setenv("TWOLINK_TIETZE_BUDGET", "1", 1);
  auto r = cli({"verify", "lemmas", "--gmax", "1"});
  CHECK(r.code == 1);
  r = cli({"verify", "lemmas", "--gmax", "1", "--budget-tietze", "10000"});
  CHECK(r.code == 0);
  unsetenv("TWOLINK_TIETZE_BUDGET");
}

TEST_CASE("cli: malformed report") {
  const auto path = temp_path("bad.json");
  std::ofstream(path) << "{not json";
  CHECK(cli({"verify-trace", path}).code == 2);
  CHECK(cli({"report", "render", path}).code == 2);
  std::filesystem::remove(path);
}
