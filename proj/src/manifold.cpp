#include "twolink/manifold.hpp"

#include <algorithm>
#include <sstream>

namespace twolink {

const MarkedSubmanifold& ManifoldRecord::mark(std::string_view label) const {
  for (const auto& m : marks)
    if (m.label == label) return m;
  throw PreconditionError("no marked submanifold labelled '" + std::string(label) + "' in " + name);
}

MarkedSubmanifold& ManifoldRecord::mark(std::string_view label) {
  return const_cast<MarkedSubmanifold&>(std::as_const(*this).mark(label));
}

bool ManifoldRecord::has_mark(std::string_view label) const {
  return std::any_of(marks.begin(), marks.end(), [&](const auto& m) { return m.label == label; });
}

void sort_marks(ManifoldRecord& r) {
  std::sort(r.marks.begin(), r.marks.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
}

bool same_state(const ManifoldRecord& a, const ManifoldRecord& b) {
  return a.name == b.name && a.pi1 == b.pi1 && a.euler == b.euler && a.form == b.form && a.basis == b.basis &&
         a.sw == b.sw && a.marks == b.marks && a.flags == b.flags && a.undo == b.undo;
}

GroupPresentation closed_pi1(const ManifoldRecord& r) {
  std::vector<Word> meridians;
  for (const auto& m : r.marks)
    if (m.peripheral) meridians.push_back(m.peripheral->meridian);
  return quotient_by_normal_closure(r.pi1, meridians);
}

GroupPresentation torus_complement_pi1(const ManifoldRecord& r, std::string_view torus) {
  if (!r.mark(torus).peripheral) throw PreconditionError("torus " + std::string(torus) + " has no peripheral data");
  std::vector<Word> meridians;
  for (const auto& m : r.marks)
    if (m.peripheral && m.label != torus) meridians.push_back(m.peripheral->meridian);
  return quotient_by_normal_closure(r.pi1, meridians);
}

IntVector class_vector(const ManifoldRecord& r, const ExponentVector& c) {
  if (static_cast<Eigen::Index>(c.size()) != r.dimension())
    throw DimensionError("class has " + std::to_string(c.size()) + " coordinates, basis has " +
                         std::to_string(r.dimension()));
  IntVector v(r.dimension());
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

ExponentVector to_exponents(const IntVector& v) {
  ExponentVector out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = to_int64(v(i));
  return out;
}

namespace {

std::string describe_pi1(const GroupPresentation& p, const TietzeOptions& opts) {
  const auto simp = tietze_simplify(p, opts).presentation;
  if (simp.relators.empty()) {
    const auto k = simp.generators.size();
    if (k == 0) return "trivial";
    if (k == 1) return "Z";
    return "F_" + std::to_string(k);
  }
  const auto k = simp.generators.size();
  if (k >= 2) {
    // Free abelian: exactly the commutators of all generator pairs.
    std::set<Word> want, have;
    for (int i = 1; i <= static_cast<int>(k); ++i)
      for (int j = i + 1; j <= static_cast<int>(k); ++j) want.insert(canonical_cyclic(commutator({i}, {j})));
    for (const auto& r : simp.relators) have.insert(canonical_cyclic(r));
    if (have == want) return k == 2 ? "Z^2" : "Z^" + std::to_string(k);
  }
  for (std::size_t h = 1; h <= 4; ++h)
    if (recognize_surface(simp, h, opts).recognized) return h == 1 ? "Z^2" : "pi1(Sigma_" + std::to_string(h) + ")";
  return "unrecognized";
}

}  // namespace

InvariantTuple invariant_tuple(const ManifoldRecord& r, const TietzeOptions& opts) {
  InvariantTuple t;
  const auto closed = closed_pi1(r);
  const auto ab = abelianization(closed);
  const auto f = invariants(r.form);
  t.euler = r.euler;
  t.b1 = ab.free_rank;
  t.torsion = ab.torsion;
  t.b2 = f.rank;
  t.signature = f.signature;
  t.even = f.even;
  t.parity_determined = r.flags.count(flag::kUndeterminedParity) == 0;
  t.pi1 = describe_pi1(closed, opts);
  return t;
}

std::string to_string(const InvariantTuple& t) {
  std::ostringstream os;
  os << "(chi=" << t.euler << ", b1=" << t.b1 << ", b2=" << t.b2 << ", sigma=" << t.signature << ", "
     << (t.parity_determined ? (t.even ? "even" : "odd") : "parity?") << ", pi1=" << t.pi1 << ")";
  return os.str();
}

Json to_json(const InvariantTuple& t) {
  Json j;
  j["euler"] = t.euler;
  j["b1"] = t.b1;
  j["b2"] = t.b2;
  j["signature"] = t.signature;
  j["parity"] = t.parity_determined ? (t.even ? "even" : "odd") : "undetermined";
  Json tor = Json::array();
  for (const auto& d : t.torsion) tor.push_back(d.str());
  j["torsion"] = tor;
  j["pi1"] = t.pi1;
  return j;
}

void check_record(const ManifoldRecord& r) {
  const auto n = r.dimension();
  if (!is_symmetric(r.form)) throw ConstructionError(r.name + ": intersection form is not symmetric");
  if (static_cast<Eigen::Index>(r.basis.size()) != n) throw ConstructionError(r.name + ": basis labels do not match the form");
  const auto b1 = static_cast<std::int64_t>(abelianization(closed_pi1(r)).free_rank);
  const auto b2 = static_cast<std::int64_t>(invariants(r.form).rank);
  if (r.euler != 2 - 2 * b1 + b2)
    throw ConstructionError(r.name + ": chi = " + std::to_string(r.euler) + " but 2 - 2 b1 + b2 = " +
                            std::to_string(2 - 2 * b1 + b2));
  if (r.sw.tracked && r.sw.known.rank() != static_cast<std::size_t>(n))
    throw ConstructionError(r.name + ": SW exponent vectors do not match the basis");
  for (const auto& m : r.marks) {
    if (m.homology_class) {
      const IntVector c = class_vector(r, *m.homology_class);
      if (m.has(flag::kSelfIntersectionZero) && pairing(r.form, c, c) != 0)
        throw ConstructionError(r.name + ": mark " + m.label + " is flagged square-zero but has nonzero square");
      if (m.dual_class && pairing(r.form, c, class_vector(r, *m.dual_class)) != 1)
        throw ConstructionError(r.name + ": mark " + m.label + " does not pair to 1 with its dual");
    }
    if (m.kind == MarkKind::sphere && !m.has(flag::kTrivialNormalBundle))
      throw ConstructionError(r.name + ": sphere " + m.label + " lacks a trivial normal bundle");
  }
}

std::string sw_to_string(const SwInvariant& sw) {
  if (!sw.tracked) return "untracked (" + sw.reason + ")";
  std::string out = to_string(sw.known);
  if (!sw.opaque.empty() && sw.known.size() > 1) out = "(" + out + ")";
  for (const auto& o : sw.opaque) out += " * [" + o + "]";
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json sw_json(const SwInvariant& sw) {
  Json j;
  j["tracked"] = sw.tracked;
  if (sw.tracked) {
    j["rank"] = sw.known.rank();
    j["known"] = to_string(sw.known);
    j["opaque"] = sw.opaque;
  } else {
    j["reason"] = sw.reason;
  }
  return j;
}

SwInvariant sw_from_json(const Json& j, std::size_t rank) {
  SwInvariant sw;
  sw.tracked = j.at("tracked").get<bool>();
  if (sw.tracked) {
    sw.known = parse_group_ring(j.at("known").get<std::string>(), j.value("rank", rank));
    sw.opaque = j.at("opaque").get<std::vector<std::string>>();
  } else {
    sw.known = GroupRingElement(0);
    sw.reason = j.at("reason").get<std::string>();
  }
  return sw;
}

const char* kind_name(MarkKind k) {
  switch (k) {
    case MarkKind::torus: return "torus";
    case MarkKind::loop: return "loop";
    case MarkKind::sphere: return "sphere";
  }
  return "?";
}

MarkKind kind_from(const std::string& s) {
  if (s == "torus") return MarkKind::torus;
  if (s == "loop") return MarkKind::loop;
  if (s == "sphere") return MarkKind::sphere;
  throw PreconditionError("unknown mark kind '" + s + "'");
}

Json mark_json(const MarkedSubmanifold& m, const std::vector<std::string>& gens) {
  Json j;
  j["kind"] = kind_name(m.kind);
  j["label"] = m.label;
  if (m.homology_class) j["class"] = *m.homology_class;
  if (m.dual_class) j["dual"] = *m.dual_class;
  if (m.kind == MarkKind::loop) j["word"] = word_to_string(m.pi1_word, gens);
  j["framing"] = m.framing_tag;
  j["flags"] = m.flags;
  if (m.peripheral) {
    j["peripheral"] = {{"x", word_to_string(m.peripheral->x, gens)},
                       {"y", word_to_string(m.peripheral->y, gens)},
                       {"meridian", word_to_string(m.peripheral->meridian, gens)}};
  }
  return j;
}

MarkedSubmanifold mark_from_json(const Json& j, const std::vector<std::string>& gens) {
  MarkedSubmanifold m;
  m.kind = kind_from(j.at("kind").get<std::string>());
  m.label = j.at("label").get<std::string>();
  if (j.contains("class")) m.homology_class = j.at("class").get<ExponentVector>();
  if (j.contains("dual")) m.dual_class = j.at("dual").get<ExponentVector>();
  if (j.contains("word")) m.pi1_word = parse_word(j.at("word").get<std::string>(), gens);
  m.framing_tag = j.value("framing", "");
  if (j.contains("flags")) m.flags = j.at("flags").get<std::set<std::string>>();
  if (j.contains("peripheral")) {
    const auto& p = j.at("peripheral");
    m.peripheral = Peripheral{parse_word(p.at("x").get<std::string>(), gens),
                              parse_word(p.at("y").get<std::string>(), gens),
                              parse_word(p.at("meridian").get<std::string>(), gens)};
  }
  return m;
}

Json matrix_json(const IntMatrix& q) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < q.cols(); ++j) row.push_back(to_int64(q(i, j)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Json state_json(const ManifoldRecord& r) {
  Json j;
  j["name"] = r.name;
  j["pi1"] = to_string(r.pi1);
  j["euler"] = r.euler;
  j["basis"] = r.basis;
  j["gram"] = matrix_json(r.form);
  j["sw"] = sw_json(r.sw);
  Json marks = Json::array();
  for (const auto& m : r.marks) marks.push_back(mark_json(m, r.pi1.generators));
  j["marks"] = marks;
  j["flags"] = r.flags;
  Json undo = Json::array();
  for (const auto& u : r.undo) {
    Json e;
    e["sphere"] = u.sphere;
    e["loop"] = mark_json(u.loop, r.pi1.generators);
    e["relator"] = word_to_string(u.relator, r.pi1.generators);
    e["block"] = u.block_labels;
    e["sw"] = sw_json(u.sw);
    e["flags"] = u.flags;
    undo.push_back(e);
  }
  j["undo"] = undo;
  return j;
}

Json to_json(const ManifoldRecord& r) {
  Json j = state_json(r);
  j["trace"] = to_json(r.trace);
  return j;
}

ManifoldRecord record_from_json(const Json& j) {
  ManifoldRecord r;
  r.name = j.at("name").get<std::string>();
  r.pi1 = parse_presentation(j.at("pi1").get<std::string>());
  r.euler = j.at("euler").get<std::int64_t>();
  r.basis = j.at("basis").get<std::vector<std::string>>();
  const auto rows = j.at("gram").get<std::vector<std::vector<long>>>();
  r.form = from_rows(rows);
  if (rows.empty()) r.form = IntMatrix(0, 0);
  const auto n = static_cast<std::size_t>(r.form.rows());
  r.sw = sw_from_json(j.at("sw"), n);
  for (const auto& m : j.at("marks")) r.marks.push_back(mark_from_json(m, r.pi1.generators));
  r.flags = j.at("flags").get<std::set<std::string>>();
  for (const auto& e : j.at("undo")) {
    SphereUndo u;
    u.sphere = e.at("sphere").get<std::string>();
    u.loop = mark_from_json(e.at("loop"), r.pi1.generators);
    u.relator = parse_word(e.at("relator").get<std::string>(), r.pi1.generators);
    u.block_labels = e.at("block").get<std::vector<std::string>>();
    u.sw = sw_from_json(e.at("sw"), n - u.block_labels.size());
    u.flags = e.at("flags").get<std::set<std::string>>();
    r.undo.push_back(std::move(u));
  }
  if (j.contains("trace")) r.trace = trace_from_json(j.at("trace"));
  return r;
}

std::string state_digest(const ManifoldRecord& r) { return sha256_hex(state_json(r).dump()); }

void push_step(ManifoldRecord& r, std::string op, Json params, std::vector<std::string> citations, Json deltas) {
  TraceStep s;
  s.op = std::move(op);
  s.params = std::move(params);
  s.citations = std::move(citations);
  s.deltas = std::move(deltas);
  s.digest = state_digest(r);
  r.trace.steps.push_back(std::move(s));
}

// ---------------------------------------------------------------------------
// Builders

namespace {

ExponentVector unit(std::size_t n, std::size_t i, std::int64_t v = 1) {
  ExponentVector e(n, 0);
  e[i] = v;
  return e;
}

MarkedSubmanifold torus_mark(std::string label, ExponentVector cls, std::optional<ExponentVector> dual,
                             std::string framing, std::set<std::string> flags,
                             std::optional<Peripheral> peripheral = std::nullopt) {
  MarkedSubmanifold m;
  m.kind = MarkKind::torus;
  m.label = std::move(label);
  m.homology_class = std::move(cls);
  m.dual_class = std::move(dual);
  m.framing_tag = std::move(framing);
  m.flags = std::move(flags);
  m.peripheral = std::move(peripheral);
  return m;
}

MarkedSubmanifold loop_mark(std::string label, Word w, std::string framing, std::set<std::string> flags) {
  MarkedSubmanifold m;
  m.kind = MarkKind::loop;
  m.label = std::move(label);
  m.pi1_word = std::move(w);
  m.framing_tag = std::move(framing);
  m.flags = std::move(flags);
  return m;
}

// (t_c^-1 - t_c) for the class c.
GroupRingElement t_inv_minus_t(const ExponentVector& c) {
  ExponentVector neg(c.size());
  std::transform(c.begin(), c.end(), neg.begin(), [](auto v) { return -v; });
  return GroupRingElement::monomial(neg, 1) - GroupRingElement::monomial(c, 1);
}

void finish(ManifoldRecord& r, Json params) {
  sort_marks(r);
  check_record(r);
  push_step(r, "construct", std::move(params), {});
}

}  // namespace

ManifoldRecord standard_block(const std::string& name) {
  ManifoldRecord r;
  r.name = name;
  if (name == "S4") {
    r.euler = 2;
    r.sw = SwInvariant::untracked("b+ = 0");
  } else if (name == "S2xS2") {
    r.euler = 4;
    r.form = hyperbolic_plane();
    r.basis = {"S2xp", "pxS2"};
    r.sw = SwInvariant::untracked("b+ = 1");
  } else if (name == "S2xS2_twisted") {
    r.euler = 4;
    r.form = from_rows({{1, 0}, {0, -1}});
    r.basis = {"h", "e"};
    r.sw = SwInvariant::untracked("b+ = 1");
  } else if (name == "T2xS2") {
    r.euler = 0;
    r.pi1 = parse_presentation("gens: x,y; rels: [x,y]");
    r.form = hyperbolic_plane();
    r.basis = {"T", "S"};
    r.sw = SwInvariant::untracked("b+ = 1");
    r.marks.push_back(torus_mark("T", {1, 0}, ExponentVector{0, 1}, "product",
                                 {flag::kSelfIntersectionZero, flag::kTrivialNormalBundle},
                                 Peripheral{{1}, {2}, {}}));
  } else if (name == "S1xS3") {
    r.euler = 0;
    r.pi1 = parse_presentation("gens: x; rels:");
    r.sw = SwInvariant::untracked("b+ = 0");
  } else {
    throw PreconditionError("unknown standard block '" + name + "'");
  }
  finish(r, {{"block", name}});
  return r;
}

ManifoldRecord product_T2_Sigma_g(int g) {
  if (g < 1) throw PreconditionError("genus must be at least 1");
  const auto gg = static_cast<std::size_t>(g);
  ManifoldRecord r;
  r.name = "T2xSigma_" + std::to_string(g);
  r.euler = 0;
  auto& p = r.pi1;
  p.generators = {"x", "y"};
  for (std::size_t i = 1; i <= gg; ++i) {
    p.generators.push_back("a" + std::to_string(i));
    p.generators.push_back("b" + std::to_string(i));
  }
  p.generators.push_back("m");
  const Word x{1}, y{2}, m{static_cast<int>(2 * gg + 3)};
  p.relators.push_back(commutator(x, y));
  for (std::size_t i = 1; i <= gg; ++i) {
    const Word a{static_cast<int>(2 * i + 1)}, b{static_cast<int>(2 * i + 2)};
    for (const Word& c : {x, y}) {
      p.relators.push_back(commutator(c, a));
      p.relators.push_back(commutator(c, b));
    }
  }
  p.relators.push_back(commutator(x, m));
  p.relators.push_back(commutator(y, m));

  const std::size_t n = 4 * gg + 2;
  r.form = IntMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  r.basis = {"T", "Sigma"};
  r.form(0, 1) = r.form(1, 0) = 1;
  for (std::size_t i = 1; i <= gg; ++i) {
    const auto s = std::to_string(i);
    const auto k = static_cast<Eigen::Index>(2 + 4 * (i - 1));
    r.basis.insert(r.basis.end(), {"x*a" + s, "y*b" + s, "x'*b" + s, "y*a" + s});
    r.form(k, k + 1) = r.form(k + 1, k) = -1;
    r.form(k + 2, k + 3) = r.form(k + 3, k + 2) = 1;
  }

  const auto eT = unit(n, 0), eS = unit(n, 1);
  const std::set<std::string> symp{flag::kSelfIntersectionZero, flag::kSymplectic, flag::kTrivialNormalBundle};
  r.marks.push_back(torus_mark("T", eT, eS, "product", symp, Peripheral{x, y, m}));
  r.marks.push_back(torus_mark("T'", eT, eS, "product", symp,
                               Peripheral{x, y, concat(inverse(m), surface_relator(gg, 3))}));
  const std::set<std::string> lag{flag::kSelfIntersectionZero, flag::kLagrangian, flag::kTrivialNormalBundle};
  for (std::size_t i = 1; i <= gg; ++i) {
    const auto s = std::to_string(i);
    const std::size_t k = 2 + 4 * (i - 1);
    r.marks.push_back(torus_mark("x*a" + s, unit(n, k), unit(n, k + 1, -1), "lagrangian", lag));
    r.marks.push_back(torus_mark("x'*b" + s, unit(n, k + 2), unit(n, k + 3), "lagrangian", lag));
    r.marks.push_back(torus_mark("y*b" + s, unit(n, k + 1), unit(n, k, -1), "lagrangian", lag));
    r.marks.push_back(torus_mark("y*a" + s, unit(n, k + 3), unit(n, k + 2), "lagrangian", lag));
    r.marks.push_back(loop_mark("gamma_" + s, {static_cast<int>(2 * i + 1)}, "product", {flag::kDisjointFromBasis}));
    r.marks.push_back(loop_mark("gamma'_" + s, {static_cast<int>(2 * i + 2)}, "product", {flag::kDisjointFromBasis}));
  }
  r.sw.known = pow(t_inv_minus_t(eT), static_cast<unsigned>(2 * g - 2));
  finish(r, {{"block", "T2xSigma"}, {"g", g}});
  return r;
}

ManifoldRecord N_g(int g) {
  if (g < 1) throw PreconditionError("genus must be at least 1");
  const auto gg = static_cast<std::size_t>(g);
  ManifoldRecord r;
  r.name = "N_" + std::to_string(g);
  r.euler = 0;
  auto& p = r.pi1;
  p = pi1_Ng(gg);
  p.relators.pop_back();  // the surface relation comes back through the meridians
  p.generators.push_back("m");
  const Word x{1}, y{2}, m{static_cast<int>(2 * gg + 3)};
  p.relators.push_back(commutator(x, m));
  p.relators.push_back(commutator(y, m));

  const std::size_t n = 2 * gg + 2;
  r.form = IntMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  r.basis = {"T", "F"};
  r.form(0, 1) = r.form(1, 0) = 1;
  for (std::size_t i = 1; i <= gg; ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    r.basis.insert(r.basis.end(), {"x*b" + std::to_string(i), "y*a" + std::to_string(i)});
    r.form(k, k + 1) = r.form(k + 1, k) = 1;
  }
  const auto eT = unit(n, 0), eF = unit(n, 1);
  const std::set<std::string> symp{flag::kSelfIntersectionZero, flag::kSymplectic, flag::kTrivialNormalBundle};
  r.marks.push_back(torus_mark("T", eT, eF, "product", symp, Peripheral{x, y, m}));
  r.marks.push_back(torus_mark("T'", eT, eF, "product", symp,
                               Peripheral{x, y, concat(inverse(m), surface_relator(gg, 3))}));
  const std::set<std::string> lag{flag::kSelfIntersectionZero, flag::kLagrangian, flag::kTrivialNormalBundle};
  for (std::size_t i = 1; i <= gg; ++i) {
    const auto s = std::to_string(i);
    r.marks.push_back(torus_mark("x'*b" + s, unit(n, 2 * i), unit(n, 2 * i + 1), "lagrangian", lag));
    r.marks.push_back(loop_mark("gamma'_" + s, {static_cast<int>(2 * i + 2)}, "lagrangian", {flag::kDisjointFromBasis}));
  }
  r.sw.known = GroupRingElement::constant(n, 1);
  r.sw.opaque = {"SW(" + r.name + ")"};
  finish(r, {{"block", "N"}, {"g", g}});
  return r;
}

}  // namespace twolink
