#include <doctest.h>

#include "oracles.hpp"

using namespace twolink;

TEST_CASE("braids: parse and print round trip") {
  const auto b = parse_braid("3: s1 s2^-1 s1 s2^-1");
  CHECK(b.strands == 3);
  CHECK(b.letters == std::vector<int>{1, -2, 1, -2});
  CHECK(to_string(parse_braid(to_string(b))) == to_string(b));
  CHECK(parse_braid("2: s1^3").letters == std::vector<int>{1, 1, 1});
  CHECK_THROWS_AS(parse_braid("2 s1"), ParseError);
  CHECK_THROWS_AS(parse_braid("2: s2"), ParseError);
  CHECK_THROWS_AS(parse_braid("2: s1^0"), ParseError);
}

TEST_CASE("alexander: standard knots") {
  CHECK(to_string(alexander_poly(parse_braid("1:"))) == "1");
  CHECK(to_string(alexander_poly(parse_braid("2: s1^3"))) == "t - 1 + t^-1");
  CHECK(to_string(alexander_poly(parse_braid("3: s1 s2^-1 s1 s2^-1"))) == "-t + 3 - t^-1");
  CHECK(to_string(alexander_poly(parse_braid("2: s1^5"))) == "t^2 - t + 1 - t^-1 + t^-2");
}

TEST_CASE("alexander: twist knots match the Artin-Fox oracle and the closed form") {
  for (int n = 0; n <= 12; ++n) {
    const auto b = twist_knot_braid(n);
    const auto mine = oracle::to_laurent(alexander_poly(b));
    CHECK_MESSAGE(oracle::equal_up_to_units(mine, oracle::artin_fox_alexander(b)), "n = ", n);
    CHECK_MESSAGE(oracle::equal_up_to_units(mine, oracle::twist_closed_form(n)), "n = ", n);
  }
}

TEST_CASE("alexander: random knots agree with both Fox routes, satisfy Delta(1) = 1 and symmetry") {
  oracle::Rng rng(21);
  int knots = 0;
  for (int trial = 0; trial < 400 && knots < 60; ++trial) {
    const auto b = oracle::random_braid(rng, 4, 9);
    if (closure_components(b) != 1) continue;
    ++knots;
    const auto d = alexander_poly(b);
    CHECK(d.augmentation() == 1);
    CHECK(d.inverted() == d);
    const auto mine = oracle::to_laurent(d);
    CHECK(oracle::equal_up_to_units(mine, oracle::artin_fox_alexander(b)));
    CHECK(equal_up_to_units(fox_calculus_oracle(wirtinger_presentation(b)), d, true));
  }
  CHECK(knots >= 20);
}

TEST_CASE("alexander: links are refused") {
  CHECK(closure_components(parse_braid("2: s1^2")) == 2);
  CHECK_THROWS_AS(alexander_poly(parse_braid("2: s1^2")), PreconditionError);
}

TEST_CASE("wirtinger: S3 colourings of trefoil and figure-eight") {
  // Homs to S3 send conjugate meridians to one conjugacy class: identity (1), 3-cycles
  // forced to commute (2), transpositions = Fox 3-colourings (9 for the trefoil, 3 otherwise).
  CHECK(oracle::hom_count_s3(wirtinger_presentation(parse_braid("2: s1^3"))) == 12);
  CHECK(oracle::hom_count_s3(wirtinger_presentation(parse_braid("3: s1 s2^-1 s1 s2^-1"))) == 6);
  const auto ab = abelianization(wirtinger_presentation(parse_braid("2: s1^3")));
  CHECK(ab.free_rank == 1);
  CHECK(ab.torsion.empty());
}

TEST_CASE("wirtinger: connected sum multiplies Alexander polynomials") {
  const auto t = wirtinger_presentation(parse_braid("2: s1^3"));
  const auto f = wirtinger_presentation(parse_braid("3: s1 s2^-1 s1 s2^-1"));
  const auto sum = fox_calculus_oracle(wirtinger_connected_sum(t, f));
  const auto expected = alexander_poly(parse_braid("2: s1^3")) * alexander_poly(parse_braid("3: s1 s2^-1 s1 s2^-1"));
  CHECK(equal_up_to_units(sum, expected, true));
}

TEST_CASE("twist family: names, distinctness, duplicate detection") {
  const auto fam = twist_knot_family(10);
  REQUIRE(fam.size() == 10);
  CHECK(fam[0].name == "unknot");
  CHECK(fam[1].name == "twist_1");
  CHECK_NOTHROW(require_distinct_alexander(fam));
  auto dup = fam;
  dup.push_back(make_knot("again", twist_knot_braid(3)));
  CHECK_THROWS_AS(require_distinct_alexander(dup), ConstructionError);
}
