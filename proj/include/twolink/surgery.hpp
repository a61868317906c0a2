#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twolink/knots.hpp"
#include "twolink/manifold.hpp"

namespace twolink {

struct FramingPairing {
  std::string a, b;
};

ManifoldRecord knot_surgery(const ManifoldRecord& m, const std::string& torus, const KnotRecord& k);

// Pairing defaults to the two marks' current framing tags.
ManifoldRecord fiber_sum(const ManifoldRecord& a, const std::string& torus_a, const ManifoldRecord& b,
                         const std::string& torus_b, const std::optional<FramingPairing>& framing = std::nullopt);

ManifoldRecord loop_surgery(const ManifoldRecord& m, const std::string& loop);
ManifoldRecord sphere_surgery(const ManifoldRecord& m, const std::string& sphere);
ManifoldRecord connected_sum(const ManifoldRecord& a, const ManifoldRecord& b);
ManifoldRecord stabilize(const ManifoldRecord& m, int copies = 1);

// Declares a framed loop (e.g. a push-off or a nullhomotopic loop from a decomposition).
ManifoldRecord add_loop(const ManifoldRecord& m, const std::string& label, const Word& word,
                        const std::string& framing, const std::set<std::string>& flags);
ManifoldRecord retag(const ManifoldRecord& m, const std::string& torus, const std::string& tag);

// Multiplicity zero log transform along a torus, killing the given loop. Lemma traces only.
ManifoldRecord log_transform(const ManifoldRecord& m, const std::string& torus, const std::string& loop);
// Replaces undetermined stabilization blocks using a certified form of the same rank.
ManifoldRecord resolve_parity(const ManifoldRecord& m, const IntMatrix& certified, const std::string& certificate);

ManifoldRecord dissolve_knot_surgery_after_stabilization(const ManifoldRecord& m);

struct RewriteRefused : PreconditionError {
  RewriteRefused(const std::string& what, std::string missing)
      : PreconditionError(what), missing_flag(std::move(missing)) {}
  std::string missing_flag;
};

struct HypothesisCheck {
  std::string name;
  bool computed = true;  // false: carried by the citation, not machine-checked
  bool holds = false;
  std::string detail;
};

struct RewriteOutcome {
  ManifoldRecord record;
  std::string branch;  // "spin" or "non-spin witness"
  std::optional<ExponentVector> witness;
  std::vector<HypothesisCheck> hypotheses;
  InvariantTuple before, after;
};

// Class of odd square orthogonal to the torus, if the lattice has one (the torus complement is then non-spin).
std::optional<IntVector> nonspin_complement_witness(const ManifoldRecord& x, const std::string& torus);

// G must be a fiber sum X #_T B followed by an S2xS2 stabilization (optionally dissolved).
RewriteOutcome mandelbaum_gompf_rewrite(const ManifoldRecord& g);

// Replays a trace from its constructor step.
ManifoldRecord replay(const Trace& t);
ManifoldRecord replay_prefix(const Trace& t, std::size_t steps);

struct ReplayCheck {
  bool ok = true;
  std::size_t steps_checked = 0;
  std::string message;
};

// Replays r's trace (or only its first `step` steps) and compares digests and, for full
// replays, the serialized record byte for byte.
ReplayCheck verify_replay(const ManifoldRecord& r, std::optional<std::size_t> step = std::nullopt);

}  // namespace twolink
