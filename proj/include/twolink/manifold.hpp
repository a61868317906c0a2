#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "twolink/groupring.hpp"
#include "twolink/grouppres.hpp"
#include "twolink/lattice.hpp"
#include "twolink/trace.hpp"

namespace twolink {

enum class MarkKind { torus, loop, sphere };

namespace flag {
inline constexpr const char* kSelfIntersectionZero = "self_intersection_zero";
inline constexpr const char* kComplementSimplyConnected = "complement_simply_connected";
inline constexpr const char* kLagrangian = "lagrangian";
inline constexpr const char* kSymplectic = "symplectic";
inline constexpr const char* kTrivialNormalBundle = "trivial_normal_bundle";
// Loop avoids every basis surface, so surgering it leaves the surviving classes intact.
inline constexpr const char* kDisjointFromBasis = "disjoint_from_basis";
// Record-level flags.
inline constexpr const char* kUndeterminedParity = "undetermined_parity";
inline constexpr const char* kFormUncertified = "form_uncertified";
inline constexpr const char* kDissolved = "dissolved";
}  // namespace flag

// Peripheral system of a torus whose tubular neighbourhood is removed in the
// record's exterior group: two curves on the torus and the meridian.
struct Peripheral {
  Word x, y, meridian;
  friend bool operator==(const Peripheral&, const Peripheral&) = default;
};

struct MarkedSubmanifold {
  MarkKind kind = MarkKind::torus;
  std::string label;
  std::optional<ExponentVector> homology_class;
  std::optional<ExponentVector> dual_class;
  Word pi1_word;
  std::string framing_tag;
  std::set<std::string> flags;
  std::optional<Peripheral> peripheral;

  bool has(const char* f) const { return flags.count(f) > 0; }
  friend bool operator==(const MarkedSubmanifold&, const MarkedSubmanifold&) = default;
};

// SW invariant as known_factor * (product of opaque factors). Opaque factors are
// group ring elements known only to be nonzero, by citation.
struct SwInvariant {
  bool tracked = true;
  GroupRingElement known{0};
  std::vector<std::string> opaque;
  std::string reason;

  static SwInvariant untracked(std::string why) {
    SwInvariant s;
    s.tracked = false;
    s.reason = std::move(why);
    return s;
  }
  bool nonzero() const { return tracked && !known.is_zero(); }
  friend bool operator==(const SwInvariant&, const SwInvariant&) = default;
};

// Reverse data stored when a loop surgery creates a belt sphere.
struct SphereUndo {
  std::string sphere;
  MarkedSubmanifold loop;
  Word relator;
  std::vector<std::string> block_labels;  // basis classes appended by the surgery
  SwInvariant sw;
  std::set<std::string> flags;
  friend bool operator==(const SphereUndo&, const SphereUndo&) = default;
};

struct ManifoldRecord {
  std::string name;
  GroupPresentation pi1;  // exterior of the peripheral tori
  std::int64_t euler = 2;
  IntMatrix form = IntMatrix(0, 0);
  std::vector<std::string> basis;
  SwInvariant sw;
  std::vector<MarkedSubmanifold> marks;  // kept sorted by label
  std::set<std::string> flags;
  std::vector<SphereUndo> undo;
  Trace trace;

  const MarkedSubmanifold& mark(std::string_view label) const;
  MarkedSubmanifold& mark(std::string_view label);
  bool has_mark(std::string_view label) const;
  Eigen::Index dimension() const { return form.rows(); }
};

void sort_marks(ManifoldRecord& r);

// Everything except the trace.
bool same_state(const ManifoldRecord& a, const ManifoldRecord& b);

GroupPresentation closed_pi1(const ManifoldRecord& r);
// Exterior of one torus only: the other peripheral meridians are filled back in.
GroupPresentation torus_complement_pi1(const ManifoldRecord& r, std::string_view torus);

IntVector class_vector(const ManifoldRecord& r, const ExponentVector& c);
ExponentVector to_exponents(const IntVector& v);

struct InvariantTuple {
  std::int64_t euler = 0;
  std::size_t b1 = 0;
  Eigen::Index b2 = 0;
  Eigen::Index signature = 0;
  bool even = true;
  bool parity_determined = true;
  std::vector<Integer> torsion;
  std::string pi1;  // "trivial", "Z", "F_k", "Z^2", "pi1(Sigma_h)" or "unrecognized"

  friend bool operator==(const InvariantTuple&, const InvariantTuple&) = default;
};

InvariantTuple invariant_tuple(const ManifoldRecord& r, const TietzeOptions& opts = {});
std::string to_string(const InvariantTuple& t);
Json to_json(const InvariantTuple& t);

// Throws ConstructionError unless chi = 2 - 2 b1 + b2 and the marks are consistent with the form.
void check_record(const ManifoldRecord& r);

std::string sw_to_string(const SwInvariant& sw);

// Serialized state (no trace) and full record.
Json state_json(const ManifoldRecord& r);
Json to_json(const ManifoldRecord& r);
ManifoldRecord record_from_json(const Json& j);
std::string state_digest(const ManifoldRecord& r);

// Appends a trace step, stamping it with the digest of the current state.
void push_step(ManifoldRecord& r, std::string op, Json params, std::vector<std::string> citations, Json deltas = Json::object());

// Builders.
ManifoldRecord standard_block(const std::string& name);
ManifoldRecord product_T2_Sigma_g(int g);
ManifoldRecord N_g(int g);
inline ManifoldRecord kodaira_thurston() { return N_g(1); }

// Manifold spec files ("twolink.manifold/1", see README).
ManifoldRecord admissible_from_spec(const std::string& spec_text);

struct AdmissibilityError : PreconditionError {
  AdmissibilityError(const std::string& what, std::vector<std::string> clauses)
      : PreconditionError(what), clauses(std::move(clauses)) {}
  std::vector<std::string> clauses;
};

}  // namespace twolink
