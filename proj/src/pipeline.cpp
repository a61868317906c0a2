#include "twolink/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

namespace twolink {

namespace {

constexpr const char* kSymmetryRule =
    "Self-diffeomorphisms of N_g permuting the framed loops extend over the loop surgeries (Wallace/Milnor surgery)";
constexpr const char* kInequivalenceRule =
    "Diffeomorphism invariance of SW invariants (Taubes); a smooth equivalence of the 2-links would extend over the "
    "belt-sphere surgeries";

std::string idx(std::size_t i) { return std::to_string(i); }

int parse_int(std::string_view s, const char* what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw ParseError(std::string("expected an integer for ") + what + ", got '" + std::string(s) + "'", 0);
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return std::string(s.substr(b, e - b + 1));
}

Word relabel(const Word& w, const std::vector<int>& perm, int first_pair_generator) {
  // Generators first_pair_generator + 2(i-1) and +1 form the i-th pair; perm is 0-based over pairs.
  Word out;
  for (int l : w) {
    const int a = std::abs(l);
    int img = a;
    if (a >= first_pair_generator) {
      const int pair = (a - first_pair_generator) / 2;
      if (pair < static_cast<int>(perm.size())) img = first_pair_generator + 2 * perm[static_cast<std::size_t>(pair)] + (a - first_pair_generator) % 2;
    }
    out.push_back(l < 0 ? -img : img);
  }
  return out;
}

std::set<Word> canonical_set(const std::vector<Word>& ws) {
  std::set<Word> out;
  for (const auto& w : ws) out.insert(canonical_cyclic(w));
  return out;
}

std::string replace_index(const std::string& label, int from, int to) {
  const auto s = std::to_string(from);
  if (label.size() >= s.size() && label.compare(label.size() - s.size(), s.size(), s) == 0 &&
      (label.size() == s.size() || !std::isdigit(static_cast<unsigned char>(label[label.size() - s.size() - 1]))))
    return label.substr(0, label.size() - s.size()) + std::to_string(to);
  return label;
}

// Relabelling the loop index set of N_g by perm: relators, loop marks, Lagrangian tori and form.
Json symmetry_check(const ManifoldRecord& block, int g, const std::vector<int>& perm, bool exact_relators) {
  const auto closed = pi1_Ng(static_cast<std::size_t>(g));
  std::vector<Word> mapped;
  for (const auto& r : closed.relators) mapped.push_back(relabel(r, perm, 3));
  bool relators_ok;
  if (exact_relators) {
    relators_ok = canonical_set(mapped) == canonical_set(closed.relators);
  } else {
    GroupPresentation q = closed;
    q.relators = mapped;
    auto rows = [](const IntMatrix& m) {
      std::multiset<std::vector<long>> out;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<long> row;
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(static_cast<long>(to_int64(m(i, j))));
        out.insert(row);
      }
      return out;
    };
    relators_ok = rows(exponent_sum_matrix(q)) == rows(exponent_sum_matrix(closed));
  }
  // Basis permutation.
  const auto n = block.dimension();
  std::vector<Eigen::Index> bperm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::string l = block.basis[static_cast<std::size_t>(i)];
    for (int k = 0; k < g; ++k) {
      const auto img = replace_index(l, k + 1, perm[static_cast<std::size_t>(k)] + 1);
      if (img != l) {
        l = img;
        break;
      }
    }
    const auto it = std::find(block.basis.begin(), block.basis.end(), l);
    bperm[static_cast<std::size_t>(i)] = it - block.basis.begin();
  }
  bool form_ok = true;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (block.form(bperm[static_cast<std::size_t>(i)], bperm[static_cast<std::size_t>(j)]) != block.form(i, j)) form_ok = false;
  bool marks_ok = true;
  for (const auto& m : block.marks) {
    std::string target = m.label;
    for (int k = 0; k < g; ++k) {
      const auto img = replace_index(m.label, k + 1, perm[static_cast<std::size_t>(k)] + 1);
      if (img != m.label) {
        target = img;
        break;
      }
    }
    const auto& tm = block.mark(target);
    if (m.kind == MarkKind::loop && relabel(m.pi1_word, perm, 3) != tm.pi1_word) marks_ok = false;
    if (m.homology_class) {
      ExponentVector img(m.homology_class->size(), 0);
      for (std::size_t i = 0; i < img.size(); ++i) img[static_cast<std::size_t>(bperm[i])] = (*m.homology_class)[i];
      if (img != *tm.homology_class) marks_ok = false;
    }
    if (m.framing_tag != tm.framing_tag || m.flags != tm.flags) marks_ok = false;
  }
  Json p = Json::array();
  for (int v : perm) p.push_back(v + 1);
  return {{"permutation", p},
          {"relators", exact_relators ? "preserved up to cyclic order" : "abelianized relators preserved"},
          {"relators_ok", relators_ok},
          {"form_ok", form_ok},
          {"marks_ok", marks_ok},
          {"pass", relators_ok && form_ok && marks_ok}};
}

struct EntryList {
  std::vector<ReportEntry> items;
  ReportEntry& computed(std::string id, std::string claim, bool pass, std::string trace_ref,
                        std::vector<std::string> deps = {}) {
    items.push_back({std::move(id), ReportEntry::Kind::computed, std::move(claim), pass ? "pass" : "fail", {},
                     std::move(trace_ref), std::move(deps)});
    return items.back();
  }
  ReportEntry& trusted(std::string id, std::string claim, std::vector<std::string> citations,
                       std::vector<std::string> deps) {
    bool ok = true;
    for (const auto& d : deps)
      for (const auto& e : items)
        if (e.id == d && e.status != "pass") ok = false;
    items.push_back({std::move(id), ReportEntry::Kind::trusted, std::move(claim), ok ? "cited" : "withheld",
                     std::move(citations), "", std::move(deps)});
    return items.back();
  }
};

}  // namespace

std::string GroupSpec::to_string() const {
  return std::string(kind == Kind::free ? "free:" : "surface:") + std::to_string(g);
}

GroupSpec parse_group_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("group spec must be free:<g> or surface:<g>", 0);
  GroupSpec out;
  const auto kind = text.substr(0, colon);
  if (kind == "free") out.kind = GroupSpec::Kind::free;
  else if (kind == "surface") out.kind = GroupSpec::Kind::surface;
  else throw ParseError("unknown group kind '" + std::string(kind) + "'", 0);
  out.g = parse_int(text.substr(colon + 1), "the genus");
  if (out.g < 1) throw PreconditionError("g must be at least 1");
  return out;
}

std::vector<KnotRecord> parse_knot_spec(std::string_view text) {
  std::vector<KnotRecord> out;
  if (text.rfind("twist:", 0) == 0) {
    const auto body = text.substr(6);
    const auto dots = body.find("..");
    if (dots == std::string_view::npos) throw ParseError("twist family must be twist:<a>..<b>", 6);
    const int a = parse_int(body.substr(0, dots), "the first twist index");
    const int b = parse_int(body.substr(dots + 2), "the last twist index");
    if (a != 0) throw PreconditionError("the knot family must start with the unknot (twist:0..b)");
    if (b < a) throw PreconditionError("empty twist range");
    return twist_knot_family(b + 1);
  }
  if (text.rfind("list:", 0) == 0) {
    std::string body(text.substr(5));
    std::size_t start = 0, k = 0;
    while (start <= body.size()) {
      const auto end = body.find(';', start);
      const auto piece = trim(std::string_view(body).substr(start, end == std::string::npos ? std::string::npos : end - start));
      if (!piece.empty()) out.push_back(make_knot("k" + std::to_string(k++), parse_braid(piece)));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (out.empty()) throw PreconditionError("knot list is empty");
    if (!(out.front().alexander == GroupRingElement::constant(1, 1)))
      throw PreconditionError("the knot family must start with the unknot (first Alexander polynomial must be 1)");
    return out;
  }
  throw ParseError("knot spec must be twist:<a>..<b> or list:<braid>;<braid>;...", 0);
}

bool CertificateReport::all_computed_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const auto& e) { return e.kind != ReportEntry::Kind::computed || e.status == "pass"; });
}

std::vector<std::string> validate_partition(const std::vector<ReportEntry>& entries) {
  std::vector<std::string> errors;
  std::map<std::string, const ReportEntry*> by_id;
  for (const auto& e : entries)
    if (!by_id.emplace(e.id, &e).second) errors.push_back("duplicate entry id " + e.id);
  for (const auto& e : entries) {
    if (e.kind == ReportEntry::Kind::computed) {
      if (e.trace_ref.empty()) errors.push_back(e.id + ": computed entry without a trace reference");
      if (e.status != "pass" && e.status != "fail") errors.push_back(e.id + ": bad computed status " + e.status);
      if (!e.citations.empty()) errors.push_back(e.id + ": computed entry carries citations");
      for (const auto& d : e.depends_on) {
        const auto it = by_id.find(d);
        if (it == by_id.end()) errors.push_back(e.id + ": unknown dependency " + d);
        else if (it->second->kind != ReportEntry::Kind::computed)
          errors.push_back(e.id + ": computed entry depends on cited entry " + d);
      }
    } else {
      if (e.citations.empty() || std::any_of(e.citations.begin(), e.citations.end(), [](const auto& c) { return c.empty(); }))
        errors.push_back(e.id + ": cited entry without a citation");
      if (e.status != "cited" && e.status != "withheld") errors.push_back(e.id + ": bad cited status " + e.status);
      if (e.depends_on.empty()) errors.push_back(e.id + ": cited entry lists no machine-checked hypotheses");
      for (const auto& d : e.depends_on) {
        const auto it = by_id.find(d);
        if (it == by_id.end()) {
          errors.push_back(e.id + ": unknown dependency " + d);
          continue;
        }
        if (it->second->kind != ReportEntry::Kind::computed)
          errors.push_back(e.id + ": hypothesis " + d + " is itself a citation");
        else if (e.status == "cited" && it->second->status != "pass")
          errors.push_back(e.id + ": cited although hypothesis " + d + " failed");
      }
    }
  }
  return errors;
}

PigeonholeResult pigeonhole(const std::vector<std::size_t>& class_sizes, int buckets) {
  PigeonholeResult out;
  if (class_sizes.empty()) return out;
  std::vector<std::size_t> order(class_sizes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return class_sizes[a] > class_sizes[b]; });
  std::vector<std::size_t> load(static_cast<std::size_t>(buckets), 0);
  std::vector<int> assign(class_sizes.size(), 0);
  std::size_t best = SIZE_MAX;
  // Adversary spreads the classes to minimise the largest bucket; buckets are interchangeable.
  auto dfs = [&](auto&& self, std::size_t k, int used, std::size_t cur_max) -> void {
    ++out.assignments_explored;
    if (cur_max >= best) return;
    if (k == order.size()) {
      best = cur_max;
      out.worst_assignment = assign;
      return;
    }
    const auto c = order[k];
    for (int b = 0; b < std::min(used + 1, buckets); ++b) {
      load[static_cast<std::size_t>(b)] += class_sizes[c];
      assign[c] = b;
      self(self, k + 1, std::max(used, b + 1), std::max(cur_max, load[static_cast<std::size_t>(b)]));
      load[static_cast<std::size_t>(b)] -= class_sizes[c];
    }
  };
  dfs(dfs, 0, 0, 0);
  out.guaranteed = best;
  return out;
}

CertificateReport run_recipe(const RecipeConfig& cfg) {
  if (cfg.knots.empty()) throw PreconditionError("knot family is empty");
  if (!(cfg.knots.front().alexander == GroupRingElement::constant(1, 1)))
    throw PreconditionError("the knot family must start with the unknot");
  CertificateReport rep;
  rep.config = cfg;
  const ManifoldRecord m = admissible_from_spec(cfg.spec_text);
  const int g = cfg.group.g;
  const int n = cfg.group.components();
  const bool free = cfg.group.kind == GroupSpec::Kind::free;

  if (invariants(m.form).even) {
    rep.roles_reason = "M is spin";
  } else if (nonspin_complement_witness(m, "T2")) {
    rep.roles_reason = "M is non-spin and the complement of T2 carries an odd class";
  } else if (nonspin_complement_witness(m, "T1")) {
    rep.knot_torus = "T2";
    rep.fiber_torus = "T1";
    rep.roles_swapped = true;
    rep.roles_reason = "M is non-spin; only the complement of T1 carries an odd class, so the tori swap roles";
  } else {
    rep.roles_reason = "M is non-spin but neither torus complement carries an odd class";
  }

  const ManifoldRecord block = free ? N_g(g) : product_T2_Sigma_g(g);
  std::vector<std::string> loops;
  for (int i = 1; i <= g; ++i) {
    if (!free) loops.push_back("gamma_" + std::to_string(i));
    loops.push_back("gamma'_" + std::to_string(i));
  }
  const ManifoldRecord reference = stabilize(m, n);
  rep.reference = invariant_tuple(reference, cfg.tietze);

  EntryList entries;
  std::vector<std::string> ambient_ids, reconstruction_ids, link_ids;
  for (std::size_t k = 0; k < cfg.knots.size(); ++k) {
    const auto& knot = cfg.knots[k];
    KnotResult res;
    res.knot = knot;
    auto mk = knot_surgery(m, rep.knot_torus, knot);
    mk = retag(mk, rep.fiber_torus, "tau_K:" + to_string(knot.braid));
    res.z = fiber_sum(mk, rep.fiber_torus, block, "T");
    res.z_star = res.z;
    for (const auto& l : loops) {
      res.z_star = loop_surgery(res.z_star, l);
      res.gamma.push_back("belt(" + l + ")");
    }

    const auto closed = closed_pi1(res.z);
    if (free) {
      const auto r = recognize_free(closed, cfg.tietze);
      res.link_group = r ? "F_" + std::to_string(*r) : "unrecognized";
      res.link_group_ok = r && static_cast<int>(*r) == g;
    } else {
      const auto r = recognize_surface(closed, static_cast<std::size_t>(g), cfg.tietze);
      res.link_group = r.recognized ? "pi1(Sigma_" + std::to_string(g) + ")" : "unrecognized";
      res.link_group_ok = r.recognized;
    }

    res.ambient = invariant_tuple(res.z_star, cfg.tietze);
    bool iso = false;
    try {
      iso = indefinite_unimodular_iso(res.z_star.form, reference.form);
    } catch (const PreconditionError&) {
    }
    res.ambient_ok = res.ambient == rep.reference && iso;

    ManifoldRecord back = res.z_star;
    try {
      for (const auto& s : res.gamma) back = sphere_surgery(back, s);
      res.reconstruction_ok = same_state(back, res.z);
    } catch (const Error&) {
      res.reconstruction_ok = false;
    }

    const std::string ref = "records/" + idx(k);
    link_ids.push_back("link_group/" + knot.name);
    entries.computed(link_ids.back(), "2-link group of Gamma_" + knot.name + " (= pi1 of Z_" + knot.name + ") is " +
                                          (free ? "F_" : "pi1(Sigma_") + std::to_string(g) + (free ? "" : ")"),
                     res.link_group_ok, ref + "/Z");
    ambient_ids.push_back("ambient/" + knot.name);
    entries.computed(ambient_ids.back(),
                     "Z*_" + knot.name + " has the invariants of M # " + std::to_string(n) +
                         "(S2xS2) and an isomorphic intersection form",
                     res.ambient_ok, ref + "/Z_star");
    reconstruction_ids.push_back("reconstruction/" + knot.name);
    entries.computed(reconstruction_ids.back(),
                     "surgery on every component of Gamma_" + knot.name + " gives back Z_" + knot.name + " field for field",
                     res.reconstruction_ok, ref + "/Z_star");
    rep.results.push_back(std::move(res));
  }

  // Pairwise SW comparison.
  std::vector<std::string> sw_ids;
  for (std::size_t a = 0; a < rep.results.size(); ++a)
    for (std::size_t b = a + 1; b < rep.results.size(); ++b) {
      const auto& sa = rep.results[a].z.sw;
      const auto& sb = rep.results[b].z.sw;
      SwVerdict v;
      v.a = a;
      v.b = b;
      if (!sa.tracked || !sb.tracked || sa.opaque != sb.opaque) {
        v.verdict = "incomparable";
      } else {
        v.witness = equal_up_to_units(sa.known, sb.known, cfg.compare == CompareMode::conjugation);
        v.verdict = v.witness ? "equal" : "distinct";
      }
      const auto& ka = rep.results[a].knot.name;
      const auto& kb = rep.results[b].knot.name;
      sw_ids.push_back("sw/" + ka + "/" + kb);
      entries.computed(sw_ids.back(), "SW(Z_" + ka + ") and SW(Z_" + kb + ") differ up to units", v.verdict == "distinct",
                       "records/" + idx(a) + "/Z");
      rep.sw.push_back(std::move(v));
    }
  if (!sw_ids.empty())
    entries.trusted("smooth_inequivalence", "the 2-links Gamma_K are pairwise smoothly inequivalent",
                    {kInequivalenceRule}, sw_ids);

  entries.trusted("ambient_diffeomorphism",
                  "each Z*_K is diffeomorphic to M # " + std::to_string(n) + "(S2xS2)",
                  {cite::kDissolve, cite::kMoishezon}, ambient_ids);

  // Prerequisites of the topological isotopy chain.
  bool flags_ok = true;
  for (const char* t : {"T1", "T2"}) flags_ok = flags_ok && m.mark(t).has(flag::kComplementSimplyConnected);
  flags_ok = flags_ok && tietze_simplify(m.pi1, cfg.tietze).presentation.generators.empty();
  entries.computed("prereq/complements", "T1 and T2 have simply connected complements in M (flags and exterior group)",
                   flags_ok, "records/0/Z");
  const auto fm = invariants(m.form);
  entries.computed("prereq/indefinite", "the intersection form of M is indefinite and unimodular",
                   fm.indefinite() && fm.unimodular, "records/0/Z");
  auto topo_deps = ambient_ids;
  topo_deps.insert(topo_deps.end(), {"prereq/complements", "prereq/indefinite"});
  topo_deps.insert(topo_deps.end(), reconstruction_ids.begin(), reconstruction_ids.end());
  entries.trusted("topological_isotopy",
                  "the 2-links Gamma_K are pairwise topologically isotopic and componentwise topologically unknotted",
                  {cite::kFreedman, cite::kWall, cite::kQuinnPerron}, topo_deps);

  rep.entries = std::move(entries.items);

  if (free) {
    EntryList sym;
    sym.items = std::move(rep.entries);
    Json checks = Json::array();
    bool ok = true;
    if (g >= 2) {
      std::vector<int> shift(static_cast<std::size_t>(g)), swap12(static_cast<std::size_t>(g));
      for (int i = 0; i < g; ++i) {
        shift[static_cast<std::size_t>(i)] = (i + 1) % g;
        swap12[static_cast<std::size_t>(i)] = i;
      }
      std::swap(swap12[0], swap12[1]);
      checks.push_back(symmetry_check(block, g, shift, true));
      checks.push_back(symmetry_check(block, g, swap12, false));
      for (const auto& c : checks) ok = ok && c.at("pass").get<bool>();
    }
    rep.symmetry = {{"group", "permutations of the loops gamma'_i (generated by the cyclic shift and (1 2))"},
                    {"checks", checks},
                    {"pass", ok}};
    sym.computed("symmetry/relabel", "the loops gamma'_i of N_g are interchangeable by relabelling", ok, "symmetry");
    sym.trusted("symmetry", "each Gamma_K is smoothly symmetric", {kSymmetryRule}, {"symmetry/relabel"});
    rep.entries = std::move(sym.items);
    brunnian_certificate(rep, m);
  } else {
    rep.symmetry = {{"pass", true}, {"note", "symmetry is only certified for free link groups"}};
    rep.brunnian = {{"property", "weaker paired-component property only"},
                    {"note", "for surface groups only dropping a pair (gamma_i, gamma'_i) is covered by the same argument"}};
  }
  rep.partition_errors = validate_partition(rep.entries);
  return rep;
}

void brunnian_certificate(CertificateReport& rep, const ManifoldRecord& m) {
  const auto& cfg = rep.config;
  if (cfg.group.kind != GroupSpec::Kind::free) throw PreconditionError("the Brunnian certificate needs a free link group");
  EntryList entries;
  entries.items = std::move(rep.entries);
  const auto t2s2 = standard_block("T2xS2");

  Json records = Json::array();
  std::vector<std::string> rewrite_ids;
  std::map<std::string, std::vector<std::size_t>> classes;
  std::string branch;
  std::string blocked;
  for (std::size_t k = 0; k < cfg.knots.size(); ++k) {
    const auto& knot = cfg.knots[k];
    auto mk = knot_surgery(m, rep.knot_torus, knot);
    const std::string tag = "tau_K:" + to_string(knot.braid);
    mk = retag(mk, rep.fiber_torus, tag);
    classes[tag].push_back(k);
    const auto w = stabilize(fiber_sum(mk, rep.fiber_torus, t2s2, "T"));
    Json entry = {{"knot", knot.name}, {"framing_class", tag}};
    bool ok = false;
    try {
      const auto d = dissolve_knot_surgery_after_stabilization(w);
      const auto out = mandelbaum_gompf_rewrite(d);
      Json hyps = Json::array();
      for (const auto& h : out.hypotheses)
        hyps.push_back({{"name", h.name}, {"machine_checked", h.computed}, {"holds", h.holds}, {"detail", h.detail}});
      entry["branch"] = out.branch;
      if (out.witness) entry["witness"] = *out.witness;
      entry["hypotheses"] = hyps;
      entry["before"] = to_json(out.before);
      entry["after"] = to_json(out.after);
      entry["record"] = to_json(out.record);
      branch = out.branch;
      ok = true;
    } catch (const RewriteRefused& e) {
      entry["blocked_by"] = e.missing_flag;
      entry["error"] = e.what();
      blocked = e.missing_flag;
    }
    records.push_back(entry);
    rewrite_ids.push_back("brunnian/rewrite/" + knot.name);
    entries.computed(rewrite_ids.back(),
                     "(M_" + knot.name + " #_T (T2xS2)) # S2xS2 rewrites to M # (T2xS2)* with machine-checked hypotheses",
                     ok, "brunnian/records/" + idx(k) + "/record");
  }

  std::vector<std::size_t> sizes;
  std::vector<std::string> class_names;
  for (const auto& [tag, members] : classes) {
    class_names.push_back(tag);
    sizes.push_back(members.size());
  }
  const auto ph = pigeonhole(sizes, 4);
  const std::size_t total = cfg.knots.size();
  const std::size_t bound = (total + 3) / 4;
  // Selected subfamily: the largest bucket of the worst-case assignment.
  std::vector<std::size_t> load(4, 0);
  for (std::size_t c = 0; c < sizes.size(); ++c) load[static_cast<std::size_t>(ph.worst_assignment[c])] += sizes[c];
  const auto big = static_cast<int>(std::max_element(load.begin(), load.end()) - load.begin());
  Json selected = Json::array();
  Json assignment = Json::object();
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    assignment[class_names[c]] = ph.worst_assignment[c];
    if (ph.worst_assignment[c] == big)
      for (auto k : classes[class_names[c]]) selected.push_back(cfg.knots[k].name);
  }
  const bool bound_ok = ph.guaranteed >= bound && selected.size() == ph.guaranteed;
  entries.computed("brunnian/pigeonhole",
                   "every assignment of the " + std::to_string(sizes.size()) +
                       " framing classes to at most 4 diffeomorphism types leaves a common type shared by >= " +
                       std::to_string(bound) + " knots",
                   bound_ok, "brunnian/pigeonhole");

  // After one more S2xS2 summand the full links are handled as well.
  bool stab_ok = true;
  std::optional<InvariantTuple> first;
  for (const auto& r : rep.results) {
    const auto t = invariant_tuple(stabilize(r.z_star), cfg.tietze);
    if (!first) first = t;
    stab_ok = stab_ok && t == *first;
  }
  entries.computed("brunnian/stabilized_ambient", "all Z*_K # S2xS2 have identical invariants", stab_ok, "records/0/Z_star");

  auto deps = rewrite_ids;
  deps.push_back("brunnian/pigeonhole");
  deps.push_back("symmetry/relabel");
  entries.trusted("brunnian", "the 2-links Gamma_K for K in K' are pairwise Brunnianly exotic",
                  {cite::kMandelbaumGompf, cite::kDissolve}, deps);
  auto sdeps = rewrite_ids;
  sdeps.push_back("brunnian/stabilized_ambient");
  entries.trusted("brunnian/stabilization",
                  "the 2-links Gamma_K for K in K' become smoothly equivalent after one more S2xS2 summand",
                  {cite::kMandelbaumGompf, cite::kDissolve}, sdeps);

  rep.brunnian = {{"property", "Brunnian (drop any one component)"},
                  {"lemma_branch", branch.empty() ? Json(nullptr) : Json(branch)},
                  {"blocked_by", blocked.empty() ? Json(nullptr) : Json(blocked)},
                  {"records", records},
                  {"pigeonhole",
                   {{"knots", total},
                    {"framing_classes", sizes.size()},
                    {"buckets", 4},
                    {"bound", bound},
                    {"guaranteed", ph.guaranteed},
                    {"assignments_explored", ph.assignments_explored},
                    {"worst_case_assignment", assignment},
                    {"selected", selected},
                    {"pass", bound_ok}}},
                  {"note", "framings are opaque tags, so only the pigeonhole bound is certified; sharper framing "
                           "tracking could select the whole family"}};
  rep.entries = std::move(entries.items);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const char* kind_name(ReportEntry::Kind k) { return k == ReportEntry::Kind::computed ? "COMPUTED" : "TRUSTED_CITATION"; }

}  // namespace

Json to_json(const CertificateReport& r) {
  Json j;
  j["schema"] = "twolink.report/1";
  j["config"] = {{"spec", r.config.spec_name},
                 {"group", r.config.group.to_string()},
                 {"knots", r.config.knots_spec},
                 {"compare", r.config.compare == CompareMode::strict ? "strict" : "conjugation"},
                 {"tietze_budget", r.config.tietze.move_budget}};
  j["roles"] = {{"knot_surgery_torus", r.knot_torus},
                {"fiber_sum_torus", r.fiber_torus},
                {"swapped", r.roles_swapped},
                {"reason", r.roles_reason}};
  j["components"] = r.config.group.components();
  Json knots = Json::array();
  for (const auto& k : r.config.knots)
    knots.push_back({{"name", k.name}, {"braid", to_string(k.braid)}, {"alexander", to_string(k.alexander)}});
  j["knots"] = knots;
  j["reference"] = to_json(r.reference);
  Json records = Json::array();
  for (const auto& k : r.results)
    records.push_back({{"knot", k.knot.name},
                       {"link_group", k.link_group},
                       {"link_group_ok", k.link_group_ok},
                       {"sw", sw_to_string(k.z.sw)},
                       {"gamma", k.gamma},
                       {"ambient", to_json(k.ambient)},
                       {"ambient_ok", k.ambient_ok},
                       {"reconstruction_ok", k.reconstruction_ok},
                       {"Z", to_json(k.z)},
                       {"Z_star", to_json(k.z_star)}});
  j["records"] = records;
  Json sw = Json::array();
  for (const auto& v : r.sw) {
    Json e = {{"a", r.results[v.a].knot.name}, {"b", r.results[v.b].knot.name}, {"verdict", v.verdict}};
    if (v.witness)
      e["witness"] = {{"sign", v.witness->sign}, {"shift", v.witness->shift}, {"inverted", v.witness->inverted}};
    sw.push_back(e);
  }
  j["sw_comparison"] = sw;
  j["symmetry"] = r.symmetry;
  j["brunnian"] = r.brunnian;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json x = {{"id", e.id}, {"kind", kind_name(e.kind)}, {"claim", e.claim}, {"status", e.status}};
    if (e.kind == ReportEntry::Kind::trusted) x["citation"] = e.citations;
    else x["trace_ref"] = e.trace_ref;
    x["depends_on"] = e.depends_on;
    entries.push_back(x);
  }
  j["entries"] = entries;
  j["partition_valid"] = r.partition_errors.empty();
  j["partition_errors"] = r.partition_errors;
  j["all_computed_pass"] = r.all_computed_pass();
  return j;
}

std::string render_report(const Json& j) {
  if (j.value("schema", "") != "twolink.report/1") throw ParseError("not a twolink report (schema mismatch)", 0);
  std::ostringstream os;
  const auto& c = j.at("config");
  os << "recipe: " << c.at("spec").get<std::string>() << ", group " << c.at("group").get<std::string>() << ", knots "
     << c.at("knots").get<std::string>() << " (" << j.at("knots").size() << "), compare "
     << c.at("compare").get<std::string>() << "\n";
  os << "roles: knot surgery on " << j.at("roles").at("knot_surgery_torus").get<std::string>() << ", fiber sum along "
     << j.at("roles").at("fiber_sum_torus").get<std::string>() << " (" << j.at("roles").at("reason").get<std::string>()
     << ")\n\n";
  os << "per knot:\n";
  for (const auto& r : j.at("records"))
    os << "  " << r.at("knot").get<std::string>() << ": link group " << r.at("link_group").get<std::string>()
       << (r.at("ambient_ok").get<bool>() ? ", ambient ok" : ", ambient MISMATCH")
       << (r.at("reconstruction_ok").get<bool>() ? ", reconstruction ok" : ", reconstruction FAILED") << "\n"
       << "      SW = " << r.at("sw").get<std::string>() << "\n";
  std::map<std::string, int> verdicts;
  for (const auto& v : j.at("sw_comparison")) ++verdicts[v.at("verdict").get<std::string>()];
  os << "\nSW comparison:";
  if (verdicts.empty()) os << " no pairs";
  for (const auto& [k, v] : verdicts) os << " " << v << " " << k;
  os << "\n";
  for (const auto& v : j.at("sw_comparison"))
    if (v.at("verdict") != "distinct")
      os << "  " << v.at("a").get<std::string>() << " vs " << v.at("b").get<std::string>() << ": "
         << v.at("verdict").get<std::string>() << "\n";
  if (j.at("brunnian").contains("pigeonhole")) {
    const auto& p = j.at("brunnian").at("pigeonhole");
    os << "Brunnian: |K'| >= " << p.at("guaranteed").get<std::size_t>() << " (bound " << p.at("bound").get<std::size_t>()
       << " of " << p.at("knots").get<std::size_t>() << " knots)\n";
  } else if (j.at("brunnian").contains("property")) {
    os << "Brunnian: " << j.at("brunnian").at("property").get<std::string>() << "\n";
  }
  os << "\nentries:\n";
  for (const auto& e : j.at("entries"))
    os << "  [" << (e.at("kind") == "COMPUTED" ? "computed" : "cited   ") << "] " << e.at("status").get<std::string>()
       << "  " << e.at("id").get<std::string>() << "\n";
  os << "\npartition " << (j.at("partition_valid").get<bool>() ? "valid" : "INVALID") << "; computed checks "
     << (j.at("all_computed_pass").get<bool>() ? "all pass" : "SOME FAIL") << "\n";
  return os.str();
}

TraceVerification verify_report_traces(const Json& report, std::optional<std::size_t> step) {
  TraceVerification out;
  std::vector<std::pair<std::string, const Json*>> targets;
  const auto& records = report.at("records");
  for (std::size_t i = 0; i < records.size(); ++i) {
    targets.emplace_back("records/" + idx(i) + "/Z", &records[i].at("Z"));
    targets.emplace_back("records/" + idx(i) + "/Z_star", &records[i].at("Z_star"));
  }
  if (report.contains("brunnian") && report.at("brunnian").contains("records")) {
    const auto& br = report.at("brunnian").at("records");
    for (std::size_t i = 0; i < br.size(); ++i)
      if (br[i].contains("record")) targets.emplace_back("brunnian/records/" + idx(i) + "/record", &br[i].at("record"));
  }
  for (const auto& [path, j] : targets) {
    std::string line = path + ": ";
    try {
      const auto rec = record_from_json(*j);
      const auto check = verify_replay(rec, step);
      bool ok = check.ok;
      std::string msg = check.message;
      if (ok && !step) {
        const auto again = replay(rec.trace);
        if (to_json(again).dump() != j->dump()) {
          ok = false;
          msg = "replayed record differs from the stored bytes";
        }
      }
      line += ok ? "ok (" + std::to_string(check.steps_checked) + " steps" + (step ? ", prefix" : ", byte-identical") + ")"
                 : "FAILED: " + msg;
      out.ok = out.ok && ok;
    } catch (const std::exception& e) {
      out.ok = false;
      line += std::string("FAILED: ") + e.what();
    }
    out.lines.push_back(line);
  }
  return out;
}

}  // namespace twolink
