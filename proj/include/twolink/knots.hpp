#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "twolink/groupring.hpp"
#include "twolink/grouppres.hpp"

namespace twolink {

struct BraidWord {
  int strands = 1;
  std::vector<int> letters;  // +i is sigma_i, -i its inverse
  friend bool operator==(const BraidWord&, const BraidWord&) = default;
};

struct KnotRecord {
  std::string name;
  BraidWord braid;
  GroupRingElement alexander{1};
};

// "<n>: s<i>[^<k>] ...", e.g. "3: s1 s2^-1 s1 s2^-1".
BraidWord parse_braid(std::string_view text);
std::string to_string(const BraidWord& b);

int closure_components(const BraidWord& b);

// Reduced Burau determinant formula, normalized.
GroupRingElement alexander_poly(const BraidWord& b);

// Wirtinger presentation of the closure, one generator per arc.
GroupPresentation wirtinger_presentation(const BraidWord& b);
// Wirtinger presentation of a connected sum: a meridian of each summand identified.
GroupPresentation wirtinger_connected_sum(const GroupPresentation& k1, const GroupPresentation& k2);

// Independent route: abelianized Fox Jacobian, gcd of maximal minors after deleting a column.
GroupRingElement fox_calculus_oracle(const GroupPresentation& wirtinger);

BraidWord twist_knot_braid(int n);
KnotRecord make_knot(const std::string& name, const BraidWord& b);
std::vector<KnotRecord> twist_knot_family(int count);
// Distinctness sweep; throws ConstructionError naming the first colliding pair.
void require_distinct_alexander(const std::vector<KnotRecord>& family);

}  // namespace twolink
