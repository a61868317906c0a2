#include <doctest.h>

#include "oracles.hpp"

using namespace twolink;

namespace {

GroupPresentation random_presentation(oracle::Rng& rng, int gens, int rels, int len) {
  GroupPresentation p;
  for (int i = 0; i < gens; ++i) p.generators.push_back(std::string(1, static_cast<char>('a' + i)));
  for (int i = 0; i < rels; ++i) {
    auto w = cyclic_reduce(free_reduce(oracle::random_word(rng, gens, len)));
    if (!w.empty()) p.relators.push_back(w);
  }
  return p;
}

bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == -w[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("words: reduction properties") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    const auto w = oracle::random_word(rng, 3, 12);
    const auto r = free_reduce(w);
    CHECK(is_reduced(r));
    CHECK(free_reduce(r) == r);
    CHECK(free_reduce(concat(w, inverse(w))).empty());
    const auto c = cyclic_reduce(r);
    CHECK(cyclic_reduce(c) == c);
    if (!c.empty()) CHECK(c.front() != -c.back());
  }
}

TEST_CASE("words: canonical cyclic form is invariant under rotation and inversion") {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = cyclic_reduce(free_reduce(oracle::random_word(rng, 3, 10)));
    if (w.empty()) continue;
    const auto k = static_cast<std::size_t>(rng.range(0, static_cast<int>(w.size()) - 1));
    Word rot(w.begin() + static_cast<long>(k), w.end());
    rot.insert(rot.end(), w.begin(), w.begin() + static_cast<long>(k));
    CHECK(canonical_cyclic(rot) == canonical_cyclic(w));
    CHECK(canonical_cyclic(inverse(w)) == canonical_cyclic(w));
  }
}

TEST_CASE("presentations: text round trip and errors") {
  const auto p = parse_presentation("gens: x,y,a1,b1; rels: [x,y], [y,b1]*a1^-1, a1^2*b1");
  CHECK(p.generators.size() == 4);
  CHECK(p.relators.size() == 3);
  CHECK(parse_presentation(to_string(p)) == p);
  CHECK(parse_presentation("gens: ; rels: ").generators.empty());
  try {
    parse_presentation("gens: x; rels: x*z");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position > 0);
  }
  CHECK_THROWS_AS(parse_presentation("gens: x,x; rels: x"), ParseError);
  CHECK_THROWS_AS(parse_presentation("rels: x"), ParseError);
}

TEST_CASE("tietze: simplification preserves the S3 hom count and replays") {
  oracle::Rng rng(43);
  for (int trial = 0; trial < 80; ++trial) {
    const auto p = random_presentation(rng, rng.range(1, 4), rng.range(0, 3), 6);
    const auto res = tietze_simplify(p);
    CHECK(replay(p, res.log) == res.presentation);
    CHECK(res.presentation.generators.size() <= p.generators.size());
    CHECK(oracle::hom_count_s3(res.presentation) == oracle::hom_count_s3(p));
    CHECK(abelianization(res.presentation) == abelianization(p));
  }
}

TEST_CASE("tietze: illegal moves are rejected") {
  const auto p = parse_presentation("gens: x,y; rels: x*y^-1");
  TietzeMove bad{TietzeMove::Kind::eliminate_generator, 0, 0, {2, 2}};
  CHECK_THROWS(apply_move(p, bad));
  TietzeMove out_of_range{TietzeMove::Kind::remove_relator, 5, 0, {}};
  CHECK_THROWS(apply_move(p, out_of_range));
}

TEST_CASE("abelianization agrees with determinantal divisors") {
  oracle::Rng rng(44);
  for (int trial = 0; trial < 120; ++trial) {
    const auto p = random_presentation(rng, rng.range(1, 4), rng.range(0, 4), 7);
    const auto ab = abelianization(p);
    const auto o = oracle::determinantal_abelianization(p);
    CHECK(ab.free_rank == o.free_rank);
    CHECK(ab.torsion == o.torsion);
  }
}

TEST_CASE("pi1(N_g): abelianization rank g + 2 and the free quotient") {
  for (std::size_t g = 1; g <= 4; ++g) {
    const auto p = pi1_Ng(g);
    CHECK(abelianization(p).free_rank == g + 2);
    CHECK(abelianization(p).torsion.empty());
    const auto q = quotient_by_normal_closure(p, {{1}, {2}});
    const auto res = tietze_simplify(q);
    CHECK(res.log.moves.size() <= 10000);
    CHECK(replay(q, res.log) == res.presentation);
    CHECK(recognize_free(q) == g);
  }
  for (std::size_t g = 1; g <= 2; ++g) {
    CHECK(oracle::determinantal_abelianization(pi1_Ng(g)).free_rank == g + 2);
    const auto q = quotient_by_normal_closure(pi1_Ng(g), {{1}, {2}});
    CHECK(oracle::hom_count_s3(q) == oracle::s3_homs_free(static_cast<int>(g)));
  }
}

TEST_CASE("recognition: free and surface groups") {
  CHECK(recognize_free(parse_presentation("gens: a,b,c; rels: c*a*b")) == 2u);
  CHECK_FALSE(recognize_free(parse_presentation("gens: a,b; rels: [a,b]")));
  CHECK_FALSE(recognize_free(parse_presentation("gens: a; rels: a^2")));
  for (std::size_t g = 1; g <= 3; ++g) {
    GroupPresentation s;
    for (std::size_t i = 1; i <= g; ++i) {
      s.generators.push_back("a" + std::to_string(i));
      s.generators.push_back("b" + std::to_string(i));
    }
    s.relators.push_back(surface_relator(g));
    CHECK(recognize_surface(s, g).recognized);
    CHECK_FALSE(recognize_surface(s, g + 1).recognized);
    // Relabel, rotate and invert the relator.
    auto w = inverse(surface_relator(g));
    std::rotate(w.begin(), w.begin() + 3, w.end());
    GroupPresentation t = s;
    std::reverse(t.generators.begin(), t.generators.end());
    for (auto& l : w) l = (l > 0 ? 1 : -1) * (static_cast<int>(2 * g) + 1 - std::abs(l));
    t.relators = {w};
    CHECK(recognize_surface(t, g).recognized);
  }
  for (int g = 1; g <= 2; ++g) {
    GroupPresentation s;
    for (int i = 1; i <= g; ++i) {
      s.generators.push_back("a" + std::to_string(i));
      s.generators.push_back("b" + std::to_string(i));
    }
    s.relators.push_back(surface_relator(static_cast<std::size_t>(g)));
    CHECK(oracle::hom_count_s3(s) == oracle::s3_homs_surface(g));
  }
}

TEST_CASE("fresh names and free products") {
  CHECK(fresh_name("a1", {"a1"}) == "a2");
  CHECK(fresh_name("a1", {"a1", "a2"}) == "a3");
  CHECK(fresh_name("x", {"x"}) == "x'");
  CHECK(fresh_name("x", {"y"}) == "x");
  const auto p = parse_presentation("gens: x,y; rels: [x,y]");
  const auto fp = free_product(p, p);
  CHECK(fp.generators.size() == 4);
  CHECK(std::set<std::string>(fp.generators.begin(), fp.generators.end()).size() == 4);
  CHECK(abelianization(fp).free_rank == 4);
}

TEST_CASE("van Kampen gluing identifies the peripheral words") {
  const auto p = parse_presentation("gens: x,y; rels: [x,y]");
  const auto q = parse_presentation("gens: u,v; rels: [u,v]");
  const auto g = svk_glue(p, q, {{{1}, {1}}, {{2}, {2}}});
  CHECK(abelianization(g).free_rank == 2);
  CHECK(oracle::hom_count_s3(g) == oracle::hom_count_s3(p));
}
