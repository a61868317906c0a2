#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"

using namespace twolink;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RecipeConfig config(const std::string& spec, const std::string& group, const std::string& knots) {
  RecipeConfig c;
  c.spec_text = slurp(oracle::fixture(spec));
  c.spec_name = spec;
  c.group = parse_group_spec(group);
  c.knots_spec = knots;
  c.knots = parse_knot_spec(knots);
  return c;
}

const ReportEntry* find(const CertificateReport& r, const std::string& id) {
  for (const auto& e : r.entries)
    if (e.id == id) return &e;
  return nullptr;
}

}  // namespace

TEST_CASE("group and knot specs") {
  CHECK(parse_group_spec("free:3").components() == 3);
  CHECK(parse_group_spec("surface:2").components() == 4);
  CHECK(parse_group_spec("surface:2").to_string() == "surface:2");
  CHECK_THROWS_AS(parse_group_spec("free"), ParseError);
  CHECK_THROWS_AS(parse_group_spec("cyclic:2"), ParseError);
  CHECK_THROWS_AS(parse_group_spec("free:x"), ParseError);
  CHECK_THROWS_AS(parse_group_spec("free:0"), PreconditionError);
  CHECK(parse_knot_spec("twist:0..4").size() == 5);
  CHECK_THROWS_AS(parse_knot_spec("twist:1..4"), PreconditionError);
  CHECK_THROWS_AS(parse_knot_spec("list:2: s1^3"), PreconditionError);
  const auto l = parse_knot_spec("list:1: ;2: s1^3; 2: s1^3");
  CHECK(l.size() == 3);
  CHECK(l[1].alexander == l[2].alexander);
  CHECK_THROWS_AS(parse_knot_spec("torus:2,3"), ParseError);
}

TEST_CASE("pigeonhole agrees with brute force") {
  oracle::Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(rng.range(1, 7)));
    for (auto& s : sizes) s = static_cast<std::size_t>(rng.range(1, 4));
    const int buckets = rng.range(1, 4);
    const auto r = pigeonhole(sizes, buckets);
    CHECK(r.guaranteed == oracle::pigeonhole_bruteforce(sizes, buckets));
    std::size_t total = 0;
    for (auto s : sizes) total += s;
    CHECK(r.guaranteed * static_cast<std::size_t>(buckets) >= total);
    std::vector<std::size_t> load(static_cast<std::size_t>(buckets), 0);
    for (std::size_t i = 0; i < sizes.size(); ++i) load[static_cast<std::size_t>(r.worst_assignment[i])] += sizes[i];
    CHECK(*std::max_element(load.begin(), load.end()) == r.guaranteed);
  }
  for (std::size_t n = 1; n <= 12; ++n) CHECK(pigeonhole(std::vector<std::size_t>(n, 1)).guaranteed == (n + 3) / 4);
}

TEST_CASE("partition validation catches each kind of violation") {
  std::vector<ReportEntry> ok = {
      {"a", ReportEntry::Kind::computed, "claim", "pass", {}, "records/0/Z", {}},
      {"b", ReportEntry::Kind::trusted, "claim", "cited", {"Freedman"}, "", {"a"}},
  };
  CHECK(validate_partition(ok).empty());
  auto no_trace = ok;
  no_trace[0].trace_ref.clear();
  CHECK_FALSE(validate_partition(no_trace).empty());
  auto no_cite = ok;
  no_cite[1].citations.clear();
  CHECK_FALSE(validate_partition(no_cite).empty());
  auto upward = ok;
  upward[0].depends_on = {"b"};
  CHECK_FALSE(validate_partition(upward).empty());
  auto premature = ok;
  premature[0].status = "fail";
  CHECK_FALSE(validate_partition(premature).empty());
  premature[1].status = "withheld";
  CHECK(validate_partition(premature).empty());
  auto dup = ok;
  dup.push_back(ok[0]);
  CHECK_FALSE(validate_partition(dup).empty());
  auto dangling = ok;
  dangling[1].depends_on = {"zzz"};
  CHECK_FALSE(validate_partition(dangling).empty());
}

TEST_CASE("recipe: free group, small family") {
  const auto rep = run_recipe(config("e2.json", "free:1", "twist:0..3"));
  CHECK(rep.partition_errors.empty());
  CHECK(rep.all_computed_pass());
  CHECK(rep.sw.size() == 6);
  for (const auto& v : rep.sw) CHECK(v.verdict == "distinct");
  for (const auto& r : rep.results) {
    CHECK(r.link_group == "F_1");
    CHECK(r.ambient_ok);
    CHECK(r.reconstruction_ok);
    CHECK(r.gamma.size() == 1);
  }
  CHECK(find(rep, "brunnian") != nullptr);
  CHECK(find(rep, "brunnian")->status == "cited");
  CHECK(find(rep, "symmetry")->status == "cited");
  CHECK(rep.brunnian.at("pigeonhole").at("guaranteed").get<std::size_t>() >= 1);
}

TEST_CASE("recipe: reports are deterministic and monotone in the family") {
  const auto a = to_json(run_recipe(config("e2.json", "free:2", "twist:0..2"))).dump();
  const auto b = to_json(run_recipe(config("e2.json", "free:2", "twist:0..2"))).dump();
  CHECK(a == b);
  const auto small = run_recipe(config("e2.json", "free:2", "twist:0..2"));
  const auto big = run_recipe(config("e2.json", "free:2", "twist:0..4"));
  for (const auto& v : small.sw) {
    bool seen = false;
    for (const auto& w : big.sw)
      if (w.a == v.a && w.b == v.b) {
        CHECK(w.verdict == v.verdict);
        seen = true;
      }
    CHECK(seen);
  }
}

TEST_CASE("recipe: duplicated knot is the negative control") {
  const auto rep = run_recipe(config("e2.json", "free:1", "list:1: ;2: s1^3;2: s1^3"));
  REQUIRE(rep.sw.size() == 3);
  CHECK(rep.sw[0].verdict == "distinct");
  CHECK(rep.sw[1].verdict == "distinct");
  CHECK(rep.sw[2].verdict == "equal");
  CHECK_FALSE(rep.all_computed_pass());
  CHECK(rep.partition_errors.empty());
  CHECK(find(rep, "smooth_inequivalence")->status == "withheld");
}

TEST_CASE("recipe: strict comparison still separates twist knots") {
  auto c = config("e2.json", "free:1", "twist:0..4");
  c.compare = CompareMode::strict;
  const auto rep = run_recipe(c);
  for (const auto& v : rep.sw) CHECK(v.verdict == "distinct");
}

TEST_CASE("recipe: surface group configuration") {
  const auto rep = run_recipe(config("e2.json", "surface:1", "twist:0..2"));
  CHECK(rep.all_computed_pass());
  for (const auto& r : rep.results) {
    CHECK(r.gamma.size() == 2);
    CHECK(r.link_group_ok);
  }
  CHECK(rep.brunnian.at("property") == "weaker paired-component property only");
  CHECK(find(rep, "brunnian") == nullptr);
}

TEST_CASE("recipe: torus roles swap when only T1 has a non-spin complement") {
  const auto rep = run_recipe(config("odd_dual.json", "free:1", "twist:0..2"));
  CHECK(rep.roles_swapped);
  CHECK(rep.knot_torus == "T2");
  CHECK(rep.fiber_torus == "T1");
  CHECK(rep.partition_errors.empty());
}

TEST_CASE("recipe: non-spin E(2) blow-up goes through the witness branch") {
  const auto rep = run_recipe(config("e2_blowup.json", "free:1", "twist:0..2"));
  CHECK_FALSE(rep.roles_swapped);
  CHECK(rep.brunnian.at("lemma_branch") == "non-spin witness");
  CHECK(rep.all_computed_pass());
}

TEST_CASE("recipe: inadmissible input and bad families are refused") {
  CHECK_THROWS_AS(run_recipe(config("bad_sw_zero.json", "free:1", "twist:0..2")), AdmissibilityError);
  auto c = config("e2.json", "free:1", "twist:0..2");
  c.knots.erase(c.knots.begin());
  CHECK_THROWS_AS(run_recipe(c), PreconditionError);
}

TEST_CASE("report traces replay byte for byte and detect edits") {
  const auto j = to_json(run_recipe(config("e2.json", "free:1", "twist:0..2")));
  const auto v = verify_report_traces(j);
  CHECK(v.ok);
  CHECK(v.lines.size() == 3 * 2 + 3);
  CHECK(verify_report_traces(j, 2).ok);
  auto edited = j;
  edited["records"][1]["Z"]["euler"] = 99;
  CHECK_FALSE(verify_report_traces(edited).ok);
  auto reordered = j;
  auto& marks = reordered["records"][0]["Z_star"]["name"];
  marks = marks.get<std::string>() + "x";
  CHECK_FALSE(verify_report_traces(reordered).ok);
  const auto text = render_report(j);
  CHECK(text.find("partition valid") != std::string::npos);
  CHECK_THROWS(render_report(Json::object()));
}

TEST_CASE("lemma suite passes for g = 1..3 and the corrupted relator fails one check") {
  const auto rep = verify_lemma_suite(3);
  CHECK(rep.all_pass());
  for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name, " g=", c.g, " ", c.detail);
  LemmaOptions bad;
  bad.corrupt_relator = true;
  const auto broken = verify_lemma_suite(2, bad);
  int failed = 0;
  for (const auto& c : broken.checks)
    if (!c.pass) {
      ++failed;
      CHECK(c.name == "pi1(N_g)/<<x,y>> ~ F_g");
    }
  CHECK(failed == 2);
  CHECK(to_json(rep).at("schema") == "twolink.lemmas/1");
}

TEST_CASE("iterated fiber sums: N_1 and T2 x Sigma_1 chains") {
  for (int g = 2; g <= 4; ++g) {
    CHECK(invariant_tuple(iterated_N1_sum(g)) == invariant_tuple(N_g(g)));
    CHECK(invariant_tuple(iterated_product_sum(g)) == invariant_tuple(product_T2_Sigma_g(g)));
  }
}
