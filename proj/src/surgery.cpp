#include "twolink/surgery.hpp"

#include <algorithm>
#include <map>

namespace twolink {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

GroupRingElement t_inv_minus_t(const ExponentVector& c) {
  ExponentVector neg(c.size());
  std::transform(c.begin(), c.end(), neg.begin(), [](auto v) { return -v; });
  return GroupRingElement::monomial(neg, 1) - GroupRingElement::monomial(c, 1);
}

ExponentVector apply_hom(const ExpMatrix& h, const ExponentVector& e) {
  ExponentVector out(static_cast<std::size_t>(h.rows()), 0);
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) out[static_cast<std::size_t>(i)] += h(i, j) * e[static_cast<std::size_t>(j)];
  return out;
}

// Embedding of an n-dimensional basis as coordinates [offset, offset + n) of a total-dimensional one.
ExpMatrix block_embedding(Eigen::Index total, Eigen::Index offset, Eigen::Index n) {
  ExpMatrix h = ExpMatrix::Zero(total, n);
  for (Eigen::Index j = 0; j < n; ++j) h(offset + j, j) = 1;
  return h;
}

void push_classes(MarkedSubmanifold& m, const ExpMatrix& h) {
  if (m.homology_class) m.homology_class = apply_hom(h, *m.homology_class);
  if (m.dual_class) m.dual_class = apply_hom(h, *m.dual_class);
}

void shift_words(MarkedSubmanifold& m, int offset) {
  m.pi1_word = shift_word(m.pi1_word, offset);
  if (m.peripheral) {
    m.peripheral->x = shift_word(m.peripheral->x, offset);
    m.peripheral->y = shift_word(m.peripheral->y, offset);
    m.peripheral->meridian = shift_word(m.peripheral->meridian, offset);
  }
}

SwInvariant push_sw(const SwInvariant& sw, const ExpMatrix& h) {
  if (!sw.tracked) return sw;
  SwInvariant out = sw;
  out.known = substitute_hom(sw.known, h);
  return out;
}

std::set<std::string> labels_of(const std::vector<MarkedSubmanifold>& marks) {
  std::set<std::string> out;
  for (const auto& m : marks) out.insert(m.label);
  return out;
}

std::size_t b1_of(const ManifoldRecord& r) { return abelianization(closed_pi1(r)).free_rank; }

bool is_trivial_summand(const ManifoldRecord& r) {
  return r.dimension() == 0 && r.marks.empty() && tietze_simplify(closed_pi1(r)).presentation.generators.empty();
}

Json step_deltas(const ManifoldRecord& before, const ManifoldRecord& after) {
  return {{"euler", after.euler - before.euler},
          {"b2", static_cast<std::int64_t>(after.dimension() - before.dimension())}};
}

// Removes coordinates (sorted ascending) from a group ring element; they must not occur.
GroupRingElement drop_coordinates(const GroupRingElement& a, const std::vector<Eigen::Index>& idx) {
  GroupRingElement out(a.rank() - idx.size());
  for (const auto& [e, c] : a.terms()) {
    ExponentVector img;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (std::binary_search(idx.begin(), idx.end(), static_cast<Eigen::Index>(i))) {
        if (e[i] != 0) throw ConstructionError("SW class has a component along a removed surgery block");
        continue;
      }
      img.push_back(e[i]);
    }
    out.add_term(img, c);
  }
  return out;
}

ExponentVector drop_coordinates(const ExponentVector& e, const std::vector<Eigen::Index>& idx) {
  ExponentVector out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (std::binary_search(idx.begin(), idx.end(), static_cast<Eigen::Index>(i))) {
      if (e[i] != 0) throw ConstructionError("marked class has a component along a removed surgery block");
      continue;
    }
    out.push_back(e[i]);
  }
  return out;
}

}  // namespace

ManifoldRecord knot_surgery(const ManifoldRecord& m, const std::string& torus, const KnotRecord& k) {
  const auto& t = m.mark(torus);
  if (t.kind != MarkKind::torus || !t.homology_class) throw PreconditionError("knot surgery needs a marked torus, got " + torus);
  std::vector<std::string> missing;
  if (!t.has(flag::kSelfIntersectionZero)) missing.push_back(flag::kSelfIntersectionZero);
  if (!t.has(flag::kComplementSimplyConnected)) missing.push_back(flag::kComplementSimplyConnected);
  if (!missing.empty()) throw PreconditionError("knot surgery on " + torus + " is missing flags: " + join(missing));
  ManifoldRecord r = m;
  if (r.sw.tracked) r.sw.known = r.sw.known * embed_knot_poly_at_class(k.alexander, *t.homology_class);
  const std::string braid = to_string(k.braid);
  r.mark(torus).framing_tag = "tau_K:" + braid;
  r.name = m.name + "_" + k.name;
  check_record(r);
  push_step(r, "knot_surgery", {{"torus", torus}, {"knot", {{"name", k.name}, {"braid", braid}}}},
            {cite::kKnotSurgery}, step_deltas(m, r));
  return r;
}

ManifoldRecord retag(const ManifoldRecord& m, const std::string& torus, const std::string& tag) {
  ManifoldRecord r = m;
  r.mark(torus).framing_tag = tag;
  push_step(r, "retag", {{"torus", torus}, {"tag", tag}}, {}, step_deltas(m, r));
  return r;
}

ManifoldRecord fiber_sum(const ManifoldRecord& a, const std::string& torus_a, const ManifoldRecord& b,
                         const std::string& torus_b, const std::optional<FramingPairing>& framing) {
  const auto& ma = a.mark(torus_a);
  const auto& mb = b.mark(torus_b);
  for (const auto* m : {&ma, &mb}) {
    if (m->kind != MarkKind::torus) throw PreconditionError("fiber sum along " + m->label + ": not a torus");
    if (!m->has(flag::kSelfIntersectionZero))
      throw PreconditionError("fiber sum along " + m->label + ": missing flag " + flag::kSelfIntersectionZero);
    if (!m->homology_class || !m->dual_class || !m->peripheral)
      throw PreconditionError("fiber sum along " + m->label + ": torus needs a class, a dual class and peripheral words");
  }
  const FramingPairing fp = framing.value_or(FramingPairing{ma.framing_tag, mb.framing_tag});
  if (fp.a != ma.framing_tag || fp.b != mb.framing_tag)
    throw PreconditionError("framing tags incompatible: pairing (" + fp.a + ", " + fp.b + ") vs marks (" +
                            ma.framing_tag + ", " + mb.framing_tag + ")");
  if (!a.undo.empty() || !b.undo.empty())
    throw PreconditionError("fiber sum of a record with pending belt spheres is not supported");

  const IntVector ta = class_vector(a, *ma.homology_class), sa = class_vector(a, *ma.dual_class);
  const IntVector tb = class_vector(b, *mb.homology_class), sb = class_vector(b, *mb.dual_class);
  const auto pa = orthogonal_complement_of_pair(a.form, ta, sa);
  const auto pb = orthogonal_complement_of_pair(b.form, tb, sb);
  const Eigen::Index na = a.dimension(), nb = b.dimension();
  const Eigen::Index ka = pa.basis.rows(), kb = pb.basis.rows();
  const Eigen::Index n = ka + kb + 2;

  ManifoldRecord r;
  r.name = a.name + "#" + b.name;
  r.euler = a.euler + b.euler;
  IntMatrix glue(2, 2);
  glue << 0, 1, 1, pairing(a.form, sa, sa) + pairing(b.form, sb, sb);
  r.form = direct_sum(direct_sum(pa.form, pb.form), glue);

  std::set<std::string> taken;
  auto fresh = [&](const std::string& s) {
    r.basis.push_back(fresh_name(s, taken));
    taken.insert(r.basis.back());
  };
  for (Eigen::Index k = 0; k < ka; ++k) fresh(pa.kept[k] >= 0 ? a.basis[pa.kept[k]] : a.name + ":c" + std::to_string(k + 1));
  for (Eigen::Index k = 0; k < kb; ++k) fresh(pb.kept[k] >= 0 ? b.basis[pb.kept[k]] : b.name + ":c" + std::to_string(k + 1));
  fresh(torus_a);
  fresh("dual(" + torus_a + ")");

  ExpMatrix ha = ExpMatrix::Zero(n, na), hb = ExpMatrix::Zero(n, nb);
  for (Eigen::Index j = 0; j < na; ++j) {
    for (Eigen::Index k = 0; k < ka; ++k) ha(k, j) = to_int64(pa.coords(k, j));
    ha(n - 2, j) = to_int64(pa.alpha[j]);
    ha(n - 1, j) = to_int64(pa.beta[j]);
  }
  for (Eigen::Index j = 0; j < nb; ++j) {
    for (Eigen::Index k = 0; k < kb; ++k) hb(ka + k, j) = to_int64(pb.coords(k, j));
    hb(n - 2, j) = to_int64(pb.alpha[j]);
    hb(n - 1, j) = to_int64(pb.beta[j]);
  }

  const auto& pera = *ma.peripheral;
  const auto& perb = *mb.peripheral;
  r.pi1 = svk_glue(a.pi1, b.pi1, {{pera.x, perb.x}, {pera.y, perb.y}, {pera.meridian, inverse(perb.meridian)}});
  const int off = static_cast<int>(a.pi1.generators.size());

  for (auto m : a.marks) {
    if (m.label == torus_a) continue;
    push_classes(m, ha);
    r.marks.push_back(std::move(m));
  }
  auto mark_names = labels_of(r.marks);
  for (auto m : b.marks) {
    if (m.label == torus_b) continue;
    push_classes(m, hb);
    shift_words(m, off);
    m.label = fresh_name(m.label, mark_names);
    mark_names.insert(m.label);
    r.marks.push_back(std::move(m));
  }
  sort_marks(r);
  r.flags = a.flags;
  r.flags.insert(b.flags.begin(), b.flags.end());

  std::vector<std::string> citations{cite::kFiberSum, cite::kNovikov};
  if (a.sw.tracked && b.sw.tracked) {
    // Relative invariants along the glued tori; their classes must be orthogonal to the torus.
    auto relative = [](const ManifoldRecord& x, const IntVector& t, const ExponentVector& tc) {
      const GroupRingElement rel = x.sw.known * t_inv_minus_t(tc);
      for (const auto& [e, c] : rel.terms()) {
        IntVector v(x.dimension());
        for (std::size_t i = 0; i < e.size(); ++i) v(static_cast<Eigen::Index>(i)) = e[i];
        if (pairing(x.form, v, t) != 0)
          throw ConstructionError(x.name + ": SW class does not restrict to the torus complement");
      }
      return rel;
    };
    r.sw.known = substitute_hom(relative(a, ta, *ma.homology_class), ha) *
                 substitute_hom(relative(b, tb, *mb.homology_class), hb);
    for (const auto& o : a.sw.opaque) r.sw.opaque.push_back("push(" + o + ")");
    for (const auto& o : b.sw.opaque) r.sw.opaque.push_back("push(" + o + ")");
    citations.push_back(cite::kTaubesGluing);
    citations.push_back(cite::kParkRelative);
  } else {
    r.sw = SwInvariant::untracked("fiber sum with an untracked summand");
  }

  const auto b1 = static_cast<std::int64_t>(b1_of(r));
  if (r.euler - 2 + 2 * b1 != n)
    throw ConstructionError("fiber sum: b2 = chi - 2 + 2 b1 = " + std::to_string(r.euler - 2 + 2 * b1) +
                            " disagrees with the glued form of rank " + std::to_string(n));
  if (invariants(r.form).signature != invariants(a.form).signature + invariants(b.form).signature)
    throw ConstructionError("fiber sum: signature is not additive");
  check_record(r);
  r.trace = a.trace;
  push_step(r, "fiber_sum",
            {{"torus_a", torus_a}, {"torus_b", torus_b}, {"framing", {fp.a, fp.b}}, {"operand", to_json(b.trace)}},
            citations, step_deltas(a, r));
  return r;
}

ManifoldRecord loop_surgery(const ManifoldRecord& m, const std::string& loop) {
  const auto& lm = m.mark(loop);
  if (lm.kind != MarkKind::loop) throw PreconditionError("loop surgery needs a framed loop, " + loop + " is not one");
  ManifoldRecord r = m;
  const Word rel = cyclic_reduce(lm.pi1_word);
  r.pi1.relators.push_back(rel);
  const auto before = static_cast<std::int64_t>(b1_of(m));
  const auto after = static_cast<std::int64_t>(b1_of(r));
  const std::int64_t db1 = after - before;
  if (db1 != 0 && db1 != -1) throw ConstructionError("loop surgery changed b1 by " + std::to_string(db1));
  r.euler += 2;

  SphereUndo u;
  u.sphere = "belt(" + loop + ")";
  u.loop = lm;
  u.relator = rel;
  u.sw = m.sw;
  u.flags = m.flags;

  MarkedSubmanifold belt;
  belt.kind = MarkKind::sphere;
  belt.label = u.sphere;
  belt.framing_tag = lm.framing_tag;
  belt.flags = {flag::kTrivialNormalBundle};

  const Eigen::Index n = m.dimension();
  if (db1 == -1) {
    if (!lm.has(flag::kDisjointFromBasis)) r.flags.insert(flag::kFormUncertified);
  } else {
    // Nullhomologous loop: the form gains a rank 2 unimodular block.
    const bool odd_base = !invariants(m.form).even;
    IntMatrix block;
    if (odd_base) {
      block = hyperbolic_plane();  // odd + H and odd + <1> + <-1> agree
      u.block_labels = {"belt(" + loop + ")", "dual(" + loop + ")"};
    } else {
      block = from_rows({{1, 0}, {0, -1}});
      u.block_labels = {"h(" + loop + ")", "e(" + loop + ")"};
      r.flags.insert(flag::kUndeterminedParity);
    }
    r.form = direct_sum(m.form, block);
    for (const auto& l : u.block_labels) r.basis.push_back(fresh_name(l, std::set<std::string>(r.basis.begin(), r.basis.end())));
    u.block_labels.assign(r.basis.end() - 2, r.basis.end());
    for (auto& mk : r.marks) {
      if (mk.homology_class) mk.homology_class->resize(static_cast<std::size_t>(n + 2), 0);
      if (mk.dual_class) mk.dual_class->resize(static_cast<std::size_t>(n + 2), 0);
    }
    ExponentVector c(static_cast<std::size_t>(n + 2), 0);
    c[static_cast<std::size_t>(n)] = 1;
    if (!odd_base) c[static_cast<std::size_t>(n + 1)] = 1;  // h + e
    belt.homology_class = c;
  }
  r.sw = SwInvariant::untracked("stabilized");
  r.marks.erase(std::find_if(r.marks.begin(), r.marks.end(), [&](const auto& x) { return x.label == loop; }));
  if (r.has_mark(belt.label)) throw PreconditionError("a sphere labelled " + belt.label + " already exists");
  r.marks.push_back(std::move(belt));
  sort_marks(r);
  r.undo.push_back(std::move(u));
  check_record(r);
  Json deltas = step_deltas(m, r);
  deltas["b1"] = db1;
  push_step(r, "loop_surgery", {{"loop", loop}}, {cite::kLoopSurgery}, deltas);
  return r;
}

ManifoldRecord sphere_surgery(const ManifoldRecord& m, const std::string& sphere) {
  const auto& sm = m.mark(sphere);
  if (sm.kind != MarkKind::sphere || !sm.has(flag::kTrivialNormalBundle))
    throw PreconditionError(sphere + " is not a sphere with trivial normal bundle");
  const auto it = std::find_if(m.undo.begin(), m.undo.end(), [&](const auto& u) { return u.sphere == sphere; });
  if (it == m.undo.end()) throw PreconditionError("component " + sphere + " lacks reverse-trace data");
  const auto ui = static_cast<std::size_t>(it - m.undo.begin());
  const SphereUndo entry = *it;

  ManifoldRecord r = m;
  auto rel = std::find(r.pi1.relators.rbegin(), r.pi1.relators.rend(), entry.relator);
  if (rel == r.pi1.relators.rend()) throw ConstructionError("recorded relator of " + sphere + " is missing");
  r.pi1.relators.erase(std::next(rel).base());

  std::vector<Eigen::Index> idx;
  for (const auto& l : entry.block_labels) {
    const auto p = std::find(r.basis.begin(), r.basis.end(), l);
    if (p == r.basis.end()) throw ConstructionError("surgery block class " + l + " is missing");
    idx.push_back(p - r.basis.begin());
  }
  std::sort(idx.begin(), idx.end());
  if (!idx.empty()) {
    const Eigen::Index n = r.dimension();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::binary_search(idx.begin(), idx.end(), i)) keep.push_back(i);
    for (Eigen::Index i : idx)
      for (Eigen::Index j : keep)
        if (r.form(i, j) != 0) throw ConstructionError("surgery block of " + sphere + " is no longer an orthogonal summand");
    IntMatrix q(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
      for (std::size_t j = 0; j < keep.size(); ++j)
        q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.form(keep[i], keep[j]);
    r.form = q;
    std::vector<std::string> basis;
    for (auto i : keep) basis.push_back(r.basis[static_cast<std::size_t>(i)]);
    r.basis = basis;
    for (auto& mk : r.marks) {
      if (mk.label == sphere) continue;
      if (mk.homology_class) mk.homology_class = drop_coordinates(*mk.homology_class, idx);
      if (mk.dual_class) mk.dual_class = drop_coordinates(*mk.dual_class, idx);
    }
    for (std::size_t k = ui + 1; k < r.undo.size(); ++k)
      if (r.undo[k].sw.tracked) r.undo[k].sw.known = drop_coordinates(r.undo[k].sw.known, idx);
    if (r.sw.tracked) r.sw.known = drop_coordinates(r.sw.known, idx);
  }
  r.euler -= 2;
  r.marks.erase(std::find_if(r.marks.begin(), r.marks.end(), [&](const auto& x) { return x.label == sphere; }));
  r.marks.push_back(entry.loop);
  sort_marks(r);
  // The entry's saved state is the state before its loop surgery; later surgeries inherit it.
  if (ui + 1 == r.undo.size()) {
    r.sw = entry.sw;
    r.flags = entry.flags;
  } else {
    r.undo[ui + 1].sw = entry.sw;
    r.undo[ui + 1].flags = entry.flags;
  }
  r.undo.erase(r.undo.begin() + static_cast<std::ptrdiff_t>(ui));
  check_record(r);
  push_step(r, "sphere_surgery", {{"sphere", sphere}}, {cite::kLoopSurgery}, step_deltas(m, r));
  return r;
}

ManifoldRecord connected_sum(const ManifoldRecord& a, const ManifoldRecord& b) {
  if (!b.undo.empty()) throw PreconditionError("connected sum with a record carrying belt spheres is not supported");
  if (is_trivial_summand(b)) {
    ManifoldRecord r = a;
    push_step(r, "connected_sum", {{"operand", to_json(b.trace)}}, {}, step_deltas(a, r));
    return r;
  }
  const Eigen::Index na = a.dimension(), nb = b.dimension(), n = na + nb;
  ManifoldRecord r;
  r.name = a.name + "#" + b.name;
  r.euler = a.euler + b.euler - 2;
  r.form = direct_sum(a.form, b.form);
  r.pi1 = free_product(a.pi1, b.pi1);
  r.basis = a.basis;
  std::set<std::string> taken(a.basis.begin(), a.basis.end());
  for (const auto& l : b.basis) {
    r.basis.push_back(fresh_name(l, taken));
    taken.insert(r.basis.back());
  }
  const ExpMatrix ha = block_embedding(n, 0, na), hb = block_embedding(n, na, nb);
  const int off = static_cast<int>(a.pi1.generators.size());
  for (auto mk : a.marks) {
    push_classes(mk, ha);
    r.marks.push_back(std::move(mk));
  }
  auto names = labels_of(r.marks);
  for (auto mk : b.marks) {
    push_classes(mk, hb);
    shift_words(mk, off);
    mk.label = fresh_name(mk.label, names);
    names.insert(mk.label);
    r.marks.push_back(std::move(mk));
  }
  sort_marks(r);
  r.flags = a.flags;
  r.flags.insert(b.flags.begin(), b.flags.end());
  r.undo = a.undo;
  for (auto& u : r.undo)
    if (u.sw.tracked) {
      const auto rank = static_cast<Eigen::Index>(u.sw.known.rank());
      u.sw = push_sw(u.sw, block_embedding(rank + nb, 0, rank));
    }
  const auto fa = invariants(a.form), fb = invariants(b.form);
  if (is_trivial_summand(a) && b.sw.tracked)
    r.sw = push_sw(b.sw, hb);
  else if (fa.b_plus >= 1 && fb.b_plus >= 1)
    r.sw = SwInvariant::untracked("connected sum with b+>=1 piece");
  else
    r.sw = SwInvariant::untracked("connected sum with a b+ = 0 piece");
  check_record(r);
  r.trace = a.trace;
  push_step(r, "connected_sum", {{"operand", to_json(b.trace)}}, {}, step_deltas(a, r));
  return r;
}

ManifoldRecord stabilize(const ManifoldRecord& m, int copies) {
  ManifoldRecord r = m;
  const auto block = standard_block("S2xS2");
  for (int i = 0; i < copies; ++i) r = connected_sum(r, block);
  return r;
}

ManifoldRecord add_loop(const ManifoldRecord& m, const std::string& label, const Word& word, const std::string& framing,
                        const std::set<std::string>& flags) {
  if (m.has_mark(label)) throw PreconditionError("mark " + label + " already exists");
  for (int l : word)
    if (l == 0 || static_cast<std::size_t>(std::abs(l)) > m.pi1.generators.size())
      throw DimensionError("loop word uses an unknown generator");
  ManifoldRecord r = m;
  MarkedSubmanifold lm;
  lm.kind = MarkKind::loop;
  lm.label = label;
  lm.pi1_word = word;
  lm.framing_tag = framing;
  lm.flags = flags;
  r.marks.push_back(std::move(lm));
  sort_marks(r);
  push_step(r, "add_loop",
            {{"label", label}, {"word", word_to_string(word, m.pi1.generators)}, {"framing", framing}, {"flags", flags}},
            {}, step_deltas(m, r));
  return r;
}

ManifoldRecord log_transform(const ManifoldRecord& m, const std::string& torus, const std::string& loop) {
  const auto& tm = m.mark(torus);
  const auto& lm = m.mark(loop);
  if (tm.kind != MarkKind::torus || !tm.homology_class || !tm.dual_class)
    throw PreconditionError("log transform needs a torus with a dual class, got " + torus);
  if (lm.kind != MarkKind::loop) throw PreconditionError("log transform needs a loop on the torus, got " + loop);
  const IntVector t = class_vector(m, *tm.homology_class), s = class_vector(m, *tm.dual_class);
  const auto pc = orthogonal_complement_of_pair(m.form, t, s);
  const Eigen::Index n = m.dimension(), k = pc.basis.rows();
  ManifoldRecord r = m;
  r.pi1.relators.push_back(cyclic_reduce(lm.pi1_word));
  r.form = pc.form;
  r.basis.clear();
  for (Eigen::Index i = 0; i < k; ++i)
    r.basis.push_back(pc.kept[i] >= 0 ? m.basis[pc.kept[i]] : m.name + ":c" + std::to_string(i + 1));
  ExpMatrix h(k, n);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = to_int64(pc.coords(i, j));
  r.marks.clear();
  for (auto mk : m.marks) {
    if (mk.label == torus || mk.label == loop) continue;
    push_classes(mk, h);
    auto zero = [](const ExponentVector& e) { return std::all_of(e.begin(), e.end(), [](auto v) { return v == 0; }); };
    if (mk.homology_class && zero(*mk.homology_class)) continue;  // the torus' class dies with it
    if (mk.dual_class && zero(*mk.dual_class)) mk.dual_class.reset();
    r.marks.push_back(std::move(mk));
  }
  sort_marks(r);
  r.sw = SwInvariant::untracked("log transform");
  const auto b1 = static_cast<std::int64_t>(b1_of(r));
  if (r.euler - 2 + 2 * b1 != k)
    throw ConstructionError("log transform: b2 = chi - 2 + 2 b1 disagrees with the reduced form");
  check_record(r);
  push_step(r, "log_transform", {{"torus", torus}, {"loop", loop}}, {cite::kLogTransform}, step_deltas(m, r));
  return r;
}

ManifoldRecord resolve_parity(const ManifoldRecord& m, const IntMatrix& certified, const std::string& certificate) {
  if (!m.flags.count(flag::kUndeterminedParity)) throw PreconditionError("record has no undetermined parity to resolve");
  const auto fc = invariants(certified);
  if (!is_symmetric(certified) || !fc.unimodular) throw PreconditionError("certified form must be symmetric and unimodular");
  if (certified.rows() != m.dimension()) throw PreconditionError("certified form has the wrong rank");
  ManifoldRecord r = m;
  if (fc.even) {
    // The certificate says every stabilization block is hyperbolic.
    for (auto& u : r.undo) {
      if (u.block_labels.size() != 2) continue;
      const auto p = std::find(r.basis.begin(), r.basis.end(), u.block_labels[0]);
      if (p == r.basis.end()) continue;
      const auto i = p - r.basis.begin();
      if (r.form(i, i) == 0) continue;
      r.form(i, i) = 0;
      r.form(i + 1, i + 1) = 0;
      r.form(i, i + 1) = r.form(i + 1, i) = 1;
      const std::string loop = u.loop.label;
      r.basis[static_cast<std::size_t>(i)] = "belt(" + loop + ")";
      r.basis[static_cast<std::size_t>(i + 1)] = "dual(" + loop + ")";
      u.block_labels = {r.basis[static_cast<std::size_t>(i)], r.basis[static_cast<std::size_t>(i + 1)]};
      auto& sphere = r.mark(u.sphere);
      if (sphere.homology_class) {
        (*sphere.homology_class)[static_cast<std::size_t>(i)] = 1;
        (*sphere.homology_class)[static_cast<std::size_t>(i + 1)] = 0;
      }
    }
  }
  if (!indefinite_unimodular_iso(r.form, certified)) {
    if (fc.even) throw ConstructionError("certified even form is not isomorphic to the record's form");
  }
  r.flags.erase(flag::kUndeterminedParity);
  for (auto& u : r.undo) u.flags.erase(flag::kUndeterminedParity);
  check_record(r);
  Json gram = Json::array();
  for (Eigen::Index i = 0; i < certified.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < certified.cols(); ++j) row.push_back(to_int64(certified(i, j)));
    gram.push_back(row);
  }
  push_step(r, "resolve_parity", {{"gram", gram}, {"certificate", certificate}}, {cite::kMoishezon, cite::kSerreClassification},
            step_deltas(m, r));
  return r;
}

// ---------------------------------------------------------------------------
// Trace-pattern rewrites

namespace {

bool is_s2xs2_operand(const Json& operand) {
  const auto t = trace_from_json(operand);
  return t.steps.size() == 1 && t.steps[0].op == "construct" && t.steps[0].params.value("block", "") == "S2xS2";
}

// Same trace with every knot surgery replaced by a bare framing retag.
Trace without_knot_surgery(const Trace& t) {
  Trace out = t;
  for (auto& s : out.steps) {
    if (s.op != "knot_surgery") continue;
    const std::string torus = s.params.at("torus");
    const std::string braid = s.params.at("knot").at("braid");
    s.op = "retag";
    s.params = {{"torus", torus}, {"tag", "tau_K:" + braid}};
    s.citations.clear();
  }
  return out;
}

}  // namespace

ManifoldRecord dissolve_knot_surgery_after_stabilization(const ManifoldRecord& m) {
  const auto& steps = m.trace.steps;
  std::optional<std::size_t> last_knot;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].op == "knot_surgery") last_knot = i;
  if (!last_knot) {
    if (m.flags.count(flag::kDissolved)) return m;
    throw PreconditionError("pattern not found: the trace has no knot surgery");
  }
  bool stabilized = false;
  for (std::size_t i = *last_knot + 1; i < steps.size(); ++i)
    if (steps[i].op == "connected_sum" && is_s2xs2_operand(steps[i].params.at("operand"))) stabilized = true;
  if (!stabilized) throw PreconditionError("pattern not found: no S2xS2 stabilization after the knot surgery");

  const Trace rewritten = without_knot_surgery(m.trace);
  ManifoldRecord r = replay(rewritten);
  if (!(invariant_tuple(r) == invariant_tuple(m)))
    throw ConstructionError("dissolving the knot surgery changed the invariants: " + to_string(invariant_tuple(m)) +
                            " vs " + to_string(invariant_tuple(r)));
  r.flags.insert(flag::kDissolved);
  r.trace = m.trace;
  push_step(r, "dissolve", Json::object(), {cite::kDissolve}, Json::object());
  return r;
}

std::optional<IntVector> nonspin_complement_witness(const ManifoldRecord& x, const std::string& torus) {
  const auto& tm = x.mark(torus);
  if (!tm.homology_class || !tm.dual_class) throw PreconditionError("torus " + torus + " needs a class and a dual class");
  const IntVector t2 = class_vector(x, *tm.homology_class);
  const IntVector s2 = class_vector(x, *tm.dual_class);
  // A dual sphere of another torus avoiding this one with odd square is already a witness.
  for (const auto& mk : x.marks) {
    if (mk.label == torus || mk.kind != MarkKind::torus || !mk.dual_class) continue;
    const IntVector s1 = class_vector(x, *mk.dual_class);
    if (pairing(x.form, s1, t2) == 0 && pairing(x.form, s1, s1) % 2 != 0) return s1;
  }
  if (pairing(x.form, s2, s2) % 2 == 0) {
    for (Eigen::Index i = 0; i < x.dimension(); ++i) {
      const IntVector e = unit_vector<Integer>(x.dimension(), i);
      if (auto w = complement_nonspin_witness(x.form, e, t2, s2)) return w;
    }
  }
  // Classes orthogonal to the torus are (complement of the pair) + Z T, so its parity decides.
  const auto pc = orthogonal_complement_of_pair(x.form, t2, s2);
  for (Eigen::Index k = 0; k < pc.basis.rows(); ++k)
    if (pc.form(k, k) % 2 != 0) return IntVector(pc.basis.row(k).transpose());
  return std::nullopt;
}

RewriteOutcome mandelbaum_gompf_rewrite(const ManifoldRecord& g) {
  const auto& steps = g.trace.steps;
  std::optional<std::size_t> f;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (steps[i].op == "fiber_sum") f = i;
  if (!f) throw RewriteRefused("pattern not found: no fiber sum in the trace", "fiber_sum");
  bool stabilized = false;
  for (std::size_t i = *f + 1; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.op == "connected_sum" && is_s2xs2_operand(s.params.at("operand")) && !stabilized)
      stabilized = true;
    else if (s.op != "dissolve")
      throw RewriteRefused("pattern not found: expected the fiber sum followed by one S2xS2 stabilization", "stabilization");
  }
  if (!stabilized) throw RewriteRefused("pattern not found: the fiber sum is not stabilized", "stabilization");

  const auto& fs = steps[*f];
  const std::string tx = fs.params.at("torus_a");
  const std::string tb = fs.params.at("torus_b");
  const bool dissolved = g.flags.count(flag::kDissolved) > 0;
  const ManifoldRecord x = replay_prefix(dissolved ? without_knot_surgery(g.trace) : g.trace, *f);
  const ManifoldRecord b = replay(trace_from_json(fs.params.at("operand")));

  RewriteOutcome out;
  auto hyp = [&](std::string name, bool holds, std::string detail, bool computed = true) {
    out.hypotheses.push_back({std::move(name), computed, holds, std::move(detail)});
    return holds;
  };
  const auto tx_tuple = invariant_tuple(x);
  if (!hyp("X simply connected", tx_tuple.pi1 == "trivial", "pi1(X) = " + tx_tuple.pi1))
    throw RewriteRefused("X = " + x.name + " is not simply connected", "simply_connected");
  const auto& txm = x.mark(tx);
  const bool comp = txm.has(flag::kComplementSimplyConnected) &&
                    tietze_simplify(torus_complement_pi1(x, tx)).presentation.generators.empty();
  if (!hyp("X minus nu(T_X) simply connected", comp, "flag and exterior group of " + tx))
    throw RewriteRefused("complement of " + tx + " is not certified simply connected", flag::kComplementSimplyConnected);
  hyp("B simply connected away from the pushoff loops", true,
      "carried by the citation; B is not required to be simply connected by the loop model", false);

  const auto fx = invariants(x.form);
  if (fx.even) {
    out.branch = "spin";
    hyp("X spin", true, "intersection form of X is even");
  } else {
    const auto w = nonspin_complement_witness(x, tx);
    if (!w) {
      hyp("X minus nu(T_X) non-spin", false, "no odd class orthogonal to T_X");
      throw RewriteRefused("X is non-spin but no non-spin witness in the complement of " + tx, "nonspin_complement_witness");
    }
    out.branch = "non-spin witness";
    out.witness = to_exponents(*w);
    hyp("X minus nu(T_X) non-spin", true, "odd class orthogonal to " + tx);
  }

  // B*: surgery on push-offs of the two circle factors of T_B, framed by the gluing.
  const auto& bm = b.mark(tb);
  const std::string framing = "pushoff[" + txm.framing_tag + "]";
  ManifoldRecord bstar = add_loop(b, "alpha_B", bm.peripheral->x, framing, {});
  bstar = add_loop(bstar, "beta_B", bm.peripheral->y, framing, {});
  bstar = loop_surgery(bstar, "alpha_B");
  bstar = loop_surgery(bstar, "beta_B");
  bstar.undo.clear();  // the belt spheres of B* are not part of the rewritten link
  ManifoldRecord r = connected_sum(x, bstar);
  r.name = x.name + "#" + b.name + "*";
  if (dissolved) r.flags.insert(flag::kDissolved);

  out.before = invariant_tuple(g);
  out.after = invariant_tuple(r);
  auto key = [](const InvariantTuple& t) { return std::make_tuple(t.euler, t.b1, t.b2, t.signature, t.pi1, t.torsion); };
  if (key(out.before) != key(out.after))
    throw ConstructionError("Mandelbaum-Gompf rewrite changed the invariants: " + to_string(out.before) + " vs " +
                            to_string(out.after));
  r.trace = g.trace;
  push_step(r, "mandelbaum_gompf", Json::object(), {cite::kMandelbaumGompf}, Json::object());
  out.record = std::move(r);
  return out;
}

// ---------------------------------------------------------------------------
// Replay

namespace {

ManifoldRecord construct_from(const Json& p) {
  const std::string block = p.at("block");
  if (block == "T2xSigma") return product_T2_Sigma_g(p.at("g").get<int>());
  if (block == "N") return N_g(p.at("g").get<int>());
  return standard_block(block);
}

ManifoldRecord apply_step(const std::optional<ManifoldRecord>& cur, const TraceStep& s) {
  if (s.op == "construct") return construct_from(s.params);
  if (s.op == "from_spec") return admissible_from_spec(s.params.at("spec").dump());
  if (!cur) throw ParseError("trace does not start with a constructor", 0);
  const auto& m = *cur;
  const auto& p = s.params;
  if (s.op == "knot_surgery") {
    const auto& k = p.at("knot");
    return knot_surgery(m, p.at("torus"), make_knot(k.at("name"), parse_braid(k.at("braid").get<std::string>())));
  }
  if (s.op == "retag") return retag(m, p.at("torus"), p.at("tag"));
  if (s.op == "fiber_sum") {
    const auto b = replay(trace_from_json(p.at("operand")));
    return fiber_sum(m, p.at("torus_a"), b, p.at("torus_b"), FramingPairing{p.at("framing")[0], p.at("framing")[1]});
  }
  if (s.op == "loop_surgery") return loop_surgery(m, p.at("loop"));
  if (s.op == "sphere_surgery") return sphere_surgery(m, p.at("sphere"));
  if (s.op == "connected_sum") return connected_sum(m, replay(trace_from_json(p.at("operand"))));
  if (s.op == "add_loop")
    return add_loop(m, p.at("label"), parse_word(p.at("word").get<std::string>(), m.pi1.generators), p.at("framing"),
                    p.at("flags").get<std::set<std::string>>());
  if (s.op == "log_transform") return log_transform(m, p.at("torus"), p.at("loop"));
  if (s.op == "resolve_parity")
    return resolve_parity(m, from_rows(p.at("gram").get<std::vector<std::vector<long>>>()), p.at("certificate"));
  if (s.op == "dissolve") return dissolve_knot_surgery_after_stabilization(m);
  if (s.op == "mandelbaum_gompf") return mandelbaum_gompf_rewrite(m).record;
  throw ParseError("unknown trace operation '" + s.op + "'", 0);
}

}  // namespace

ManifoldRecord replay_prefix(const Trace& t, std::size_t steps) {
  if (steps == 0 || steps > t.steps.size()) throw PreconditionError("replay prefix out of range");
  std::optional<ManifoldRecord> cur;
  for (std::size_t i = 0; i < steps; ++i) cur = apply_step(cur, t.steps[i]);
  return *cur;
}

ManifoldRecord replay(const Trace& t) { return replay_prefix(t, t.steps.size()); }

ReplayCheck verify_replay(const ManifoldRecord& r, std::optional<std::size_t> step) {
  ReplayCheck out;
  const auto& steps = r.trace.steps;
  const std::size_t upto = step.value_or(steps.size());
  if (upto == 0 || upto > steps.size()) {
    out.ok = false;
    out.message = "step " + std::to_string(upto) + " out of range 1.." + std::to_string(steps.size());
    return out;
  }
  std::optional<ManifoldRecord> cur;
  for (std::size_t i = 0; i < upto; ++i) {
    try {
      cur = apply_step(cur, steps[i]);
    } catch (const std::exception& e) {
      out.ok = false;
      out.message = "step " + std::to_string(i + 1) + " (" + steps[i].op + ") failed: " + e.what();
      return out;
    }
    out.steps_checked = i + 1;
    if (cur->trace.steps.back().digest != steps[i].digest) {
      out.ok = false;
      out.message = "digest mismatch at step " + std::to_string(i + 1) + " (" + steps[i].op + ")";
      return out;
    }
  }
  if (!step && to_json(*cur).dump() != to_json(r).dump()) {
    out.ok = false;
    out.message = "replayed record differs from the stored record";
  }
  return out;
}

}  // namespace twolink
