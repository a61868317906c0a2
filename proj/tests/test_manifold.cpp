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

struct Expected {
  const char* name;
  std::int64_t euler;
  std::size_t b1;
  Eigen::Index b2, sigma;
  bool even;
  const char* pi1;
};

}  // namespace

TEST_CASE("standard blocks: invariant tuples") {
  const Expected table[] = {
      {"S4", 2, 0, 0, 0, true, "trivial"},
      {"S2xS2", 4, 0, 2, 0, true, "trivial"},
      {"S2xS2_twisted", 4, 0, 2, 0, false, "trivial"},
      {"T2xS2", 0, 2, 2, 0, true, "Z^2"},
      {"S1xS3", 0, 1, 0, 0, true, "Z"},
  };
  for (const auto& e : table) {
    const auto r = standard_block(e.name);
    CHECK_NOTHROW(check_record(r));
    const auto t = invariant_tuple(r);
    CHECK_MESSAGE(t.euler == e.euler, e.name);
    CHECK_MESSAGE(t.b1 == e.b1, e.name);
    CHECK_MESSAGE(t.b2 == e.b2, e.name);
    CHECK_MESSAGE(t.signature == e.sigma, e.name);
    CHECK_MESSAGE(t.even == e.even, e.name);
    CHECK_MESSAGE(t.pi1 == e.pi1, e.name);
  }
  CHECK_THROWS_AS(standard_block("CP2"), PreconditionError);
}

TEST_CASE("building blocks: T2 x Sigma_g and N_g") {
  for (int g = 1; g <= 4; ++g) {
    const auto b = product_T2_Sigma_g(g);
    CHECK_NOTHROW(check_record(b));
    const auto tb = invariant_tuple(b);
    CHECK(tb.euler == 0);
    CHECK(tb.b1 == static_cast<std::size_t>(2 * g + 2));
    CHECK(tb.b2 == 4 * g + 2);
    CHECK(tb.signature == 0);
    CHECK(b.sw.tracked);
    // SW(T2 x Sigma_g) = (t^-1 - t)^(2g-2) with t the fiber class.
    const auto& c = *b.mark("T").homology_class;
    GroupRingElement expected(c.size());
    for (const auto& [e, coef] : oracle::binomial_power(2 * g - 2)) {
      ExponentVector v(c.size());
      for (std::size_t i = 0; i < c.size(); ++i) v[i] = e * c[i];
      expected.add_term(v, Integer(coef.str()));
    }
    CHECK(b.sw.known == expected);

    const auto n = N_g(g);
    CHECK_NOTHROW(check_record(n));
    const auto tn = invariant_tuple(n);
    CHECK(tn.euler == 0);
    CHECK(tn.b1 == static_cast<std::size_t>(g + 2));
    CHECK(tn.b2 == 2 * g + 2);
    for (int i = 1; i <= g; ++i) CHECK(n.has_mark("gamma'_" + std::to_string(i)));
    CHECK(n.has_mark("T"));
    CHECK(n.has_mark("T'"));
  }
  CHECK_THROWS_AS(N_g(0), PreconditionError);
}

TEST_CASE("records: JSON round trip preserves every field") {
  std::vector<ManifoldRecord> recs = {standard_block("T2xS2"), product_T2_Sigma_g(2), N_g(3),
                                      admissible_from_spec(slurp(oracle::fixture("e2.json")))};
  for (const auto& r : recs) {
    const auto back = record_from_json(to_json(r));
    CHECK(same_state(back, r));
    CHECK(to_json(back).dump() == to_json(r).dump());
    CHECK(state_digest(back) == state_digest(r));
  }
}

TEST_CASE("records: digests change with the state") {
  auto r = standard_block("S2xS2");
  const auto d = state_digest(r);
  r.euler += 1;
  CHECK(state_digest(r) != d);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("records: consistency checks catch broken records") {
  auto r = standard_block("T2xS2");
  r.euler = 3;
  CHECK_THROWS_AS(check_record(r), ConstructionError);
}

TEST_CASE("spec files: E(2) is admissible") {
  const auto m = admissible_from_spec(slurp(oracle::fixture("e2.json")));
  const auto t = invariant_tuple(m);
  CHECK(t.euler == 24);
  CHECK(t.b2 == 22);
  CHECK(t.signature == -16);
  CHECK(t.even);
  CHECK(t.pi1 == "trivial");
  CHECK(m.mark("T1").has(flag::kComplementSimplyConnected));
  CHECK(to_string(m.sw.known) == "1");
}

TEST_CASE("spec files: rejected fixtures name the violated clause") {
  const std::pair<const char*, const char*> cases[] = {
      {"bad_sw_zero.json", "nonzero SW"},
      {"bad_definite.json", "indefinite intersection form"},
      {"bad_small_b2.json", "b2 >= |sigma| + 4"},
  };
  for (const auto& [file, clause] : cases) {
    try {
      admissible_from_spec(slurp(oracle::fixture(file)));
      FAIL("accepted ", file);
    } catch (const AdmissibilityError& e) {
      bool found = false;
      for (const auto& c : e.clauses) found = found || c == clause;
      CHECK_MESSAGE(found, file, ": ", e.what());
    }
  }
}

TEST_CASE("spec files: malformed input") {
  CHECK_THROWS(admissible_from_spec("{"));
  CHECK_THROWS(admissible_from_spec("{\"schema\": \"twolink.manifold/1\"}"));
  CHECK_THROWS(admissible_from_spec("{\"schema\": \"something/else\"}"));
}

TEST_CASE("closed groups of the building blocks") {
  CHECK(abelianization(closed_pi1(product_T2_Sigma_g(2))).free_rank == 6);
  const auto n = N_g(2);
  CHECK(abelianization(closed_pi1(n)).free_rank == 4);
  // The exterior of T in N_g with the other torus filled: meridian killed back in.
  CHECK(abelianization(torus_complement_pi1(n, "T")).free_rank >= 3);
}
