#pragma once

// Brute-force and closed-form references used by the tests. None of these call the
// library's own algorithms for the quantity being checked.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "twolink/pipeline.hpp"

namespace oracle {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
// Univariate Laurent polynomial, exponent -> coefficient, no zero entries.
using Laurent = std::map<long, BigInt>;

Laurent to_laurent(const twolink::GroupRingElement& a);
// Shift to lowest exponent 0 and make the value at t = 1 positive.
Laurent normalize(Laurent p);
bool equal_up_to_units(const Laurent& a, const Laurent& b);

// Alexander polynomial from the Artin action of the braid on the free group, Fox
// derivatives at t, and one (n-1)-minor expanded by cofactors.
Laurent artin_fox_alexander(const twolink::BraidWord& b);
// Twist knot with n half twists: n = 2m-1 gives m t - (2m-1) + m t^-1, n = 2m gives -m t + (2m+1) - m t^-1.
Laurent twist_closed_form(int n);
// (t^-1 - t)^k by the binomial theorem.
Laurent binomial_power(int k);

struct Signs {
  long plus = 0, minus = 0, zero = 0;
};
// Congruence diagonalization over Q.
Signs rational_inertia(const twolink::IntMatrix& q);
Rational rational_det(const twolink::IntMatrix& q);
// Abelian invariants from determinantal divisors (gcd of k x k minors); small matrices only.
twolink::AbelianInvariants determinantal_abelianization(const twolink::GroupPresentation& p);

// Number of homomorphisms to the symmetric group S3, by enumerating generator images.
std::uint64_t hom_count_s3(const twolink::GroupPresentation& p);
// |Hom(F_r, S3)| and |Hom(pi1(Sigma_g), S3)| from the character count formula.
std::uint64_t s3_homs_free(int r);
std::uint64_t s3_homs_surface(int g);

// Smallest possible largest bucket over every assignment of classes to buckets.
std::size_t pigeonhole_bruteforce(const std::vector<std::size_t>& sizes, int buckets);

// Small deterministic generator for property tests (xorshift64*).
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9E3779B97F4A7C15ull) {}
  std::uint64_t next();
  int range(int lo, int hi);  // inclusive
};

twolink::BraidWord random_braid(Rng& rng, int max_strands, int max_len);
twolink::IntMatrix random_symmetric(Rng& rng, int n, int bound);
twolink::Word random_word(Rng& rng, int generators, int max_len);

std::string fixture(const std::string& name);

}  // namespace oracle
