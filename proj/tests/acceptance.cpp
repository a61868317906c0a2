// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "twolink/cli.hpp"

using namespace twolink;

namespace {

constexpr double kAlexanderSeconds = 1.0;
constexpr double kSwSeconds = 5.0;
constexpr double kRecipeSeconds = 30.0;
constexpr std::size_t kTietzeBudget = 10000;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back(what);
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RecipeConfig recipe_config(const std::string& group, const std::string& knots) {
  RecipeConfig c;
  c.spec_text = slurp(oracle::fixture("e2.json"));
  c.spec_name = "e2.json";
  c.group = parse_group_spec(group);
  c.knots_spec = knots;
  c.knots = parse_knot_spec(knots);
  c.tietze.move_budget = kTietzeBudget;
  return c;
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  o.require(to_string(alexander_poly(parse_braid("1:"))) == "1", "unknot is not 1");
  for (const char* text : {"2: s1^3", "3: s1 s2^-1 s1 s2^-1"}) {
    const auto b = parse_braid(text);
    const auto d = alexander_poly(b);
    o.require(equal_up_to_units(d, fox_calculus_oracle(wirtinger_presentation(b)), true).has_value(),
              std::string(text) + " disagrees with the Fox oracle");
    o.require(oracle::equal_up_to_units(oracle::to_laurent(d), oracle::artin_fox_alexander(b)),
              std::string(text) + " disagrees with the Artin-Fox oracle");
  }
  for (const auto& k : twist_knot_family(10)) {
    const auto a1 = k.alexander.augmentation();
    o.require(a1 == 1 || a1 == -1, k.name + ": Delta(1) != +-1");
    o.require(equal_up_to_units(k.alexander.inverted(), k.alexander, false).has_value(), k.name + ": not symmetric");
  }
  const double s = seconds_since(t0);
  o.require(s < kAlexanderSeconds, "runtime " + std::to_string(s) + " s");
  o.notes.push_back("time " + std::to_string(s) + " s (limit " + std::to_string(kAlexanderSeconds) + ")");
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = admissible_from_spec(slurp(oracle::fixture("e2.json")));
  o.require(to_string(m.sw.known) == "1" && m.sw.opaque.empty(), "fixture SW is not 1");
  o.require(*m.mark("T1").homology_class == ExponentVector{1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
            "[T1] is not e1");
  const auto tre = knot_surgery(m, "T1", make_knot("trefoil", parse_braid("2: s1^3")));
  o.require(to_string(tre.sw.known) == "t1^2 - 1 + t1^-2", "trefoil gives " + to_string(tre.sw.known));
  const auto un = knot_surgery(m, "T1", make_knot("unknot", parse_braid("1:")));
  o.require(un.sw == m.sw, "unknot changes SW");
  std::vector<GroupRingElement> sws;
  for (const auto& k : twist_knot_family(10)) sws.push_back(knot_surgery(m, "T1", k).sw.known);
  for (bool inversion : {false, true})
    for (std::size_t i = 0; i < sws.size(); ++i)
      for (std::size_t j = i + 1; j < sws.size(); ++j)
        o.require(!equal_up_to_units(sws[i], sws[j], inversion),
                  "twist " + std::to_string(i) + " ~ twist " + std::to_string(j));
  const double s = seconds_since(t0);
  o.require(s < kSwSeconds, "runtime " + std::to_string(s) + " s");
  o.notes.push_back("time " + std::to_string(s) + " s (limit " + std::to_string(kSwSeconds) + ")");
  return o;
}

Outcome criterion3() {
  Outcome o;
  TietzeOptions opts;
  opts.move_budget = kTietzeBudget;
  for (std::size_t g = 1; g <= 4; ++g) {
    const auto p = pi1_Ng(g);
    const auto q = quotient_by_normal_closure(p, {{1}, {2}});
    const auto res = tietze_simplify(q, opts);
    o.require(!res.log.budget_exhausted && res.log.moves.size() <= kTietzeBudget, "budget exhausted for g=" + std::to_string(g));
    o.require(replay(q, res.log) == res.presentation, "log does not replay for g=" + std::to_string(g));
    o.require(recognize_free(q, opts) == g, "quotient not free of rank " + std::to_string(g));
    o.require(abelianization(p).free_rank == g + 2 && abelianization(p).torsion.empty(),
              "H1(N_" + std::to_string(g) + ") rank != g+2");
  }
  const auto m = admissible_from_spec(slurp(oracle::fixture("e2.json")));
  const auto knot = make_knot("trefoil", parse_braid("2: s1^3"));
  for (int g = 1; g <= 2; ++g) {
    const auto mk = knot_surgery(m, "T1", knot);
    const auto zf = fiber_sum(mk, "T2", N_g(g), "T");
    o.require(recognize_free(closed_pi1(zf), opts) == static_cast<std::size_t>(g), "pi1(Z_K) not F_" + std::to_string(g));
    const auto zs = fiber_sum(mk, "T2", product_T2_Sigma_g(g), "T");
    o.require(recognize_surface(closed_pi1(zs), static_cast<std::size_t>(g), opts).recognized,
              "pi1(Z_K) not the genus " + std::to_string(g) + " surface group");
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::ostringstream out, err;
  const char* argv[] = {"twolink", "verify", "lemmas", "--gmax", "3"};
  const int code = run_cli(5, argv, out, err);
  o.require(code == 0, "verify lemmas exit " + std::to_string(code));
  const auto rep = verify_lemma_suite(3);
  for (const auto& c : rep.checks) {
    const auto& t = c.actual;
    const auto g = static_cast<Eigen::Index>(c.g);
    o.require(c.pass, c.name + " g=" + std::to_string(c.g));
    if (c.name == "B-hat_g ~ T2xS2")
      o.require(t.euler == 0 && t.b2 == 2 && t.even && t.pi1 == "Z^2", "B-hat tuple " + to_string(t));
    if (c.name == "B*_g ~ (T2xS2)#2g(S2xS2)")
      o.require(t.b2 == 4 * g + 2 && t.even && t.signature == 0, "B* tuple " + to_string(t));
    if (c.name == "N* ~ (T2xS2)#(S2xS2)") o.require(t.euler == 2 && t.b2 == 4 && t.even, "N* tuple " + to_string(t));
    if (c.name == "N*_g ~ (T2xS2)#g(S2xS2)")
      o.require(t.euler == 2 * g && t.b2 == 2 * g + 2 && t.even, "N*_g tuple " + to_string(t));
  }
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (int g = 2; g <= 3; ++g) {
    const auto f = iterated_product_sum(g);
    const auto& c = *f.mark("T").homology_class;
    GroupRingElement expected(c.size());
    for (const auto& [e, coef] : oracle::binomial_power(2 * g - 2)) {
      ExponentVector v(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) v[i] = e * c[i];
      expected.add_term(v, Integer(coef.str()));
    }
    o.require(f.sw.tracked && f.sw.opaque.empty() && f.sw.known == expected, "g=" + std::to_string(g) + ": " + sw_to_string(f.sw));
    bool park = false;
    for (const auto& s : f.trace.steps)
      if (s.op == "fiber_sum")
        for (const auto& cit : s.citations) park = park || cit == cite::kParkRelative;
    o.require(park, "fiber sum step does not cite the relative factors");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  try {
    admissible_from_spec(slurp(oracle::fixture("e2.json")));
  } catch (const std::exception& e) {
    o.require(false, std::string("E(2) rejected: ") + e.what());
  }
  const std::pair<const char*, const char*> bad[] = {
      {"bad_sw_zero.json", "nonzero SW"},
      {"bad_definite.json", "indefinite intersection form"},
      {"bad_small_b2.json", "b2 >= |sigma| + 4"},
  };
  for (const auto& [file, clause] : bad) {
    try {
      admissible_from_spec(slurp(oracle::fixture(file)));
      o.require(false, std::string(file) + " accepted");
    } catch (const AdmissibilityError& e) {
      bool found = false;
      for (const auto& c : e.clauses) found = found || c == clause;
      o.require(found, std::string(file) + " rejected without clause '" + clause + "'");
    }
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = run_recipe(recipe_config("free:2", "twist:0..4"));
  std::size_t distinct = 0;
  for (const auto& v : rep.sw) distinct += v.verdict == "distinct";
  o.require(rep.sw.size() == 10 && distinct == 10, std::to_string(distinct) + " distinct verdicts");
  const auto m = admissible_from_spec(rep.config.spec_text);
  const auto reference = stabilize(m, 2);
  const auto ref_tuple = invariant_tuple(reference);
  for (const auto& r : rep.results) {
    o.require(invariant_tuple(r.z_star) == ref_tuple, r.knot.name + ": ambient tuple differs");
    o.require(indefinite_unimodular_iso(r.z_star.form, reference.form), r.knot.name + ": forms not isomorphic");
    ManifoldRecord back = r.z_star;
    for (const auto& s : r.gamma) back = sphere_surgery(back, s);
    o.require(same_state(back, r.z), r.knot.name + ": sphere surgery does not reproduce Z_K");
  }
  o.require(rep.partition_errors.empty() && validate_partition(rep.entries).empty(), "partition invalid");
  o.require(rep.all_computed_pass(), "some computed entry failed");
  const double s = seconds_since(t0);
  o.require(s < kRecipeSeconds, "runtime " + std::to_string(s) + " s");
  o.notes.push_back("time " + std::to_string(s) + " s (limit " + std::to_string(kRecipeSeconds) + ")");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto rep = run_recipe(recipe_config("free:2", "twist:0..8"));
  const auto j = to_json(rep);
  const auto& ph = j.at("brunnian").at("pigeonhole");
  const std::size_t n = rep.config.knots.size();
  const auto guaranteed = ph.at("guaranteed").get<std::size_t>();
  o.require(n == 9, "family size " + std::to_string(n));
  o.require(guaranteed >= (n + 3) / 4, "pigeonhole guarantees only " + std::to_string(guaranteed));
  o.require(ph.at("selected").size() == guaranteed, "selected subfamily has the wrong size");
  std::map<std::string, std::size_t> classes;
  for (const auto& r : j.at("brunnian").at("records")) ++classes[r.at("framing_class").get<std::string>()];
  std::vector<std::size_t> sizes;
  for (const auto& [tag, count] : classes) sizes.push_back(count);
  o.require(oracle::pigeonhole_bruteforce(sizes, 4) == guaranteed, "brute force disagrees");
  o.require(j.at("brunnian").at("lemma_branch") == "spin", "rewrite branch");

  const auto dup = run_recipe(recipe_config("free:1", "list:1: ;2: s1^3;2: s1^3"));
  bool equal_seen = false;
  for (const auto& v : dup.sw) equal_seen = equal_seen || (v.a == 1 && v.b == 2 && v.verdict == "equal");
  o.require(equal_seen, "duplicated knot not reported equal");
  o.require(!dup.all_computed_pass(), "duplicated knot did not fail a computed check");

  const auto v = verify_report_traces(j);
  o.require(v.ok, "verify-trace failed");
  std::size_t identical = 0;
  for (const auto& l : v.lines) identical += l.find("byte-identical") != std::string::npos;
  o.require(identical == 2 * n + n, std::to_string(identical) + " byte-identical records");
  o.notes.push_back("|K'| >= " + std::to_string(guaranteed) + " of " + std::to_string(n));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"1 Alexander engine", criterion1},     {"2 knot surgery SW", criterion2},
      {"3 group engine", criterion3},         {"4 lemma suite g=1..3", criterion4},
      {"5 fiber sum SW gluing", criterion5},  {"6 admissibility validator", criterion6},
      {"7 recipe end-to-end", criterion7},    {"8 Brunnian section", criterion8},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("exception: ") + e.what());
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name;
    for (const auto& n : o.notes) std::cout << "  [" << n << "]";
    std::cout << "\n";
  }
  return all ? 0 : 1;
}
