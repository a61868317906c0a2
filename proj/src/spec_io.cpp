#include <algorithm>

#include "twolink/manifold.hpp"

namespace twolink {

namespace {

ExponentVector read_class(const Json& j, const std::vector<std::string>& basis) {
  if (j.is_string()) {
    auto it = std::find(basis.begin(), basis.end(), j.get<std::string>());
    if (it == basis.end()) throw PreconditionError("class label '" + j.get<std::string>() + "' is not a basis label");
    ExponentVector e(basis.size(), 0);
    e[static_cast<std::size_t>(it - basis.begin())] = 1;
    return e;
  }
  auto e = j.get<ExponentVector>();
  if (e.size() != basis.size()) throw DimensionError("class vector length does not match the basis");
  return e;
}

}  // namespace

ManifoldRecord admissible_from_spec(const std::string& spec_text) {
  Json spec;
  try {
    spec = Json::parse(spec_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifold spec is not valid JSON: ") + e.what(), e.byte);
  }
  if (spec.value("schema", "") != "twolink.manifold/1")
    throw PreconditionError("manifold spec must declare schema \"twolink.manifold/1\"");

  ManifoldRecord r;
  r.name = spec.value("name", "M");
  const GroupPresentation closed = parse_presentation(spec.at("pi1").get<std::string>());
  r.pi1 = spec.contains("exterior_pi1") ? parse_presentation(spec.at("exterior_pi1").get<std::string>()) : closed;
  r.euler = spec.at("euler").get<std::int64_t>();
  const auto rows = spec.at("gram").get<std::vector<std::vector<long>>>();
  r.form = rows.empty() ? IntMatrix(0, 0) : from_rows(rows);
  const auto n = static_cast<std::size_t>(r.form.rows());
  if (spec.contains("basis")) {
    r.basis = spec.at("basis").get<std::vector<std::string>>();
  } else {
    for (std::size_t i = 1; i <= n; ++i) r.basis.push_back("e" + std::to_string(i));
  }
  if (r.basis.size() != n) throw DimensionError("basis labels do not match the Gram matrix");
  if (!is_symmetric(r.form)) throw PreconditionError("Gram matrix must be symmetric");
  r.sw.known = parse_group_ring(spec.at("sw").get<std::string>(), n);

  for (const auto& mj : spec.at("marks")) {
    MarkedSubmanifold m;
    m.kind = MarkKind::torus;
    const auto kind = mj.value("kind", "torus");
    if (kind == "loop") m.kind = MarkKind::loop;
    else if (kind != "torus") throw PreconditionError("spec marks must be tori or loops");
    m.label = mj.at("label").get<std::string>();
    if (mj.contains("class")) m.homology_class = read_class(mj.at("class"), r.basis);
    if (mj.contains("dual")) m.dual_class = read_class(mj.at("dual"), r.basis);
    if (mj.contains("word")) m.pi1_word = parse_word(mj.at("word").get<std::string>(), r.pi1.generators);
    m.framing_tag = mj.value("framing", "product");
    if (mj.contains("flags")) m.flags = mj.at("flags").get<std::set<std::string>>();
    if (m.kind == MarkKind::torus) {
      Peripheral p;
      if (mj.contains("peripheral")) {
        const auto& pj = mj.at("peripheral");
        p.x = parse_word(pj.value("x", "1"), r.pi1.generators);
        p.y = parse_word(pj.value("y", "1"), r.pi1.generators);
        p.meridian = parse_word(pj.value("meridian", "1"), r.pi1.generators);
      }
      m.peripheral = p;
    }
    r.marks.push_back(std::move(m));
  }
  sort_marks(r);

  // Clause name and detail; the error carries the names, the message both.
  std::vector<std::pair<std::string, std::string>> failed;
  auto fail = [&](std::string clause, std::string detail) { failed.emplace_back(std::move(clause), std::move(detail)); };
  const auto closed_simp = tietze_simplify(closed).presentation;
  if (!closed_simp.generators.empty()) fail("simply connected", "pi1 does not simplify to the trivial group");
  if (r.sw.known.is_zero()) fail("nonzero SW", "SW element is 0, so there is no basic class");
  for (const char* t : {"T1", "T2"}) {
    if (!r.has_mark(t)) {
      fail("marked tori", std::string("missing torus ") + t);
      continue;
    }
    const auto& m = r.mark(t);
    if (!m.homology_class || !m.dual_class) fail("dual classes", std::string(t) + " needs class and dual");
    if (!m.has(flag::kSelfIntersectionZero)) fail("square-zero tori", std::string(t) + " lacks the self_intersection_zero flag");
    if (!m.has(flag::kComplementSimplyConnected))
      fail("simply connected complement", std::string(t) + " lacks the complement_simply_connected flag");
  }
  if (r.has_mark("T1") && r.has_mark("T2") && r.mark("T1").dual_class && r.mark("T2").dual_class) {
    const auto& t1 = r.mark("T1");
    const auto& t2 = r.mark("T2");
    const auto rep = admissible_check(r.form, class_vector(r, *t1.homology_class), class_vector(r, *t1.dual_class),
                                      class_vector(r, *t2.homology_class), class_vector(r, *t2.dual_class));
    for (const auto& v : rep.violations) {
      const auto colon = v.find(": ");
      fail(v.substr(0, colon), colon == std::string::npos ? "" : v.substr(colon + 2));
    }
    const auto ext = tietze_simplify(r.pi1).presentation;
    if (!ext.generators.empty()) fail("simply connected complement", "pi1 of M minus both tori does not simplify to trivial");
  }
  const auto rank = invariants(r.form).rank;
  if (r.euler != 2 + rank)
    fail("euler characteristic", "chi = " + std::to_string(r.euler) + " but 2 + b2 = " + std::to_string(2 + rank));
  if (!failed.empty()) {
    std::string msg = "manifold spec is not admissible:";
    std::vector<std::string> clauses;
    for (const auto& [c, d] : failed) {
      msg += "\n  - " + c + ": " + d;
      if (std::find(clauses.begin(), clauses.end(), c) == clauses.end()) clauses.push_back(c);
    }
    throw AdmissibilityError(msg, clauses);
  }
  check_record(r);
  push_step(r, "from_spec", {{"spec", spec}}, {});
  return r;
}

}  // namespace twolink
