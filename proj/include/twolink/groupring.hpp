#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twolink/integer.hpp"

namespace twolink {

using ExponentVector = std::vector<std::int64_t>;

// Element of Z[Z^r]: a Laurent polynomial in r commuting variables.
// Terms are kept sorted by exponent vector with no zero coefficients.
class GroupRingElement {
 public:
  using Terms = std::map<ExponentVector, Integer>;

  explicit GroupRingElement(std::size_t rank = 1) : rank_(rank) {}

  static GroupRingElement constant(std::size_t rank, const Integer& c);
  static GroupRingElement monomial(const ExponentVector& e, const Integer& c = 1);
  // Single-variable element from (exponent, coefficient) pairs.
  static GroupRingElement univariate(const std::vector<std::pair<std::int64_t, long>>& terms);

  std::size_t rank() const { return rank_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const ExponentVector& e, const Integer& c);
  Integer coefficient(const ExponentVector& e) const;

  // Value at t = 1 (augmentation).
  Integer augmentation() const;
  // All exponents negated (the involution t -> t^-1).
  GroupRingElement inverted() const;
  GroupRingElement shifted(const ExponentVector& u) const;
  GroupRingElement negated() const;

  // Lexicographically smallest / largest exponent; element must be nonzero.
  const ExponentVector& min_exponent() const;
  const ExponentVector& max_exponent() const;

  friend bool operator==(const GroupRingElement&, const GroupRingElement&) = default;

 private:
  std::size_t rank_;
  Terms terms_;
};

GroupRingElement add(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement sub(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement mul(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement pow(const GroupRingElement& a, unsigned n);

inline GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b) { return add(a, b); }
inline GroupRingElement operator-(const GroupRingElement& a, const GroupRingElement& b) { return sub(a, b); }
inline GroupRingElement operator*(const GroupRingElement& a, const GroupRingElement& b) { return mul(a, b); }

// h is s x r; exponent vector e maps to h*e.
GroupRingElement substitute_hom(const GroupRingElement& a, const ExpMatrix& h);
// t^j -> (2j)*c.
GroupRingElement embed_knot_poly_at_class(const GroupRingElement& delta, const ExponentVector& c);

struct UnitWitness {
  int sign = 1;
  ExponentVector shift;
  bool inverted = false;
};

// a = sign * t^shift * b', with b' = b or (if allow_inversion) b with exponents negated.
std::optional<UnitWitness> equal_up_to_units(const GroupRingElement& a, const GroupRingElement& b,
                                             bool allow_inversion);

// Univariate helpers.
GroupRingElement divide_exact(const GroupRingElement& a, const GroupRingElement& b);
GroupRingElement poly_gcd(const GroupRingElement& a, const GroupRingElement& b);
// Center the exponent range and make the value at 1 positive (or the leading coefficient
// positive when the value at 1 is zero).
GroupRingElement normalize_alexander(const GroupRingElement& a);

// "t - 1 + t^-1" for one variable, "2*t1^2*t3^-1 - 1" for several; terms printed from
// the lexicographically largest exponent down.
std::string to_string(const GroupRingElement& a);
GroupRingElement parse_group_ring(std::string_view text, std::size_t rank);

}  // namespace twolink
