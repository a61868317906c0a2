#include "twolink/grouppres.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>

#include "twolink/lattice.hpp"

namespace twolink {

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int l : w) {
    if (!out.empty() && out.back() == -l) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

Word cyclic_reduce(const Word& w) {
  Word r = free_reduce(w);
  std::size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
    ++lo;
    --hi;
  }
  return Word(r.begin() + static_cast<long>(lo), r.begin() + static_cast<long>(hi));
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l = -l;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return free_reduce(out);
}

Word commutator(const Word& u, const Word& v) {
  return concat(concat(u, v), concat(inverse(u), inverse(v)));
}

Word power(const Word& w, int k) {
  const Word base = k < 0 ? inverse(w) : w;
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out.insert(out.end(), base.begin(), base.end());
  return free_reduce(out);
}

Word canonical_cyclic(const Word& w) {
  if (w.empty()) return w;
  Word best;
  for (const Word& base : {w, inverse(w)}) {
    for (std::size_t r = 0; r < base.size(); ++r) {
      Word rot(base.begin() + static_cast<long>(r), base.end());
      rot.insert(rot.end(), base.begin(), base.begin() + static_cast<long>(r));
      if (best.empty() || rot < best) best = std::move(rot);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class PresentationParser {
 public:
  PresentationParser(std::string_view s, std::vector<std::string> names)
      : s_(s), names_(std::move(names)) {}

  GroupPresentation parse_full() {
    GroupPresentation p;
    keyword("gens");
    expect(':');
    skip();
    if (peek() != ';') {
      while (true) {
        skip();
        const auto at = pos_;
        std::string n = name();
        if (std::find(names_.begin(), names_.end(), n) != names_.end())
          throw ParseError("duplicate generator '" + n + "'", at);
        names_.push_back(n);
        skip();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect(';');
    keyword("rels");
    expect(':');
    p.generators = names_;
    skip();
    if (!at_end()) {
      while (true) {
        p.relators.push_back(relator());
        skip();
        if (at_end()) break;
        expect(',');
      }
    }
    return p;
  }

  Word parse_single() {
    Word w = relator();
    skip();
    if (!at_end()) throw ParseError("unexpected trailing input", pos_);
    return w;
  }

 private:
  Word relator() {
    Word lhs = word();
    skip();
    if (!at_end() && peek() == '=') {
      ++pos_;
      Word rhs = word();
      return free_reduce(concat(lhs, inverse(rhs)));
    }
    return lhs;
  }

  Word word() {
    Word out;
    skip();
    if (!at_end() && peek() == '1') {
      ++pos_;
      return out;
    }
    bool any = false;
    while (true) {
      skip();
      if (at_end()) break;
      const char c = peek();
      if (c == '*') {
        if (!any) throw ParseError("'*' without a left factor", pos_);
        ++pos_;
        skip();
        Word f = factor();
        out.insert(out.end(), f.begin(), f.end());
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == '[') {
        Word f = factor();
        out.insert(out.end(), f.begin(), f.end());
        any = true;
        continue;
      }
      break;
    }
    if (!any) throw ParseError("expected a word", pos_);
    return free_reduce(out);
  }

  Word factor() {
    skip();
    if (at_end()) throw ParseError("expected a factor", pos_);
    Word base;
    if (peek() == '(') {
      ++pos_;
      base = word();
      expect(')');
    } else if (peek() == '[') {
      ++pos_;
      Word u = word();
      expect(',');
      Word v = word();
      expect(']');
      base = commutator(u, v);
    } else {
      const auto at = pos_;
      std::string n = name();
      auto it = std::find(names_.begin(), names_.end(), n);
      if (it == names_.end()) throw ParseError("unknown generator '" + n + "'", at);
      base = {static_cast<int>(it - names_.begin()) + 1};
    }
    if (!at_end() && peek() == '^') {
      ++pos_;
      int sgn = 1;
      if (!at_end() && (peek() == '-' || peek() == '+')) {
        sgn = peek() == '-' ? -1 : 1;
        ++pos_;
      }
      const auto at = pos_;
      std::string digits;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) digits += s_[pos_++];
      if (digits.empty()) throw ParseError("expected an exponent", at);
      base = power(base, sgn * std::stoi(digits));
    }
    return base;
  }

  std::string name() {
    const auto start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
      throw ParseError("expected a generator name", pos_);
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '\''))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void keyword(const std::string& k) {
    skip();
    if (s_.substr(pos_, k.size()) != k) throw ParseError("expected '" + k + "'", pos_);
    pos_ += k.size();
  }
  void expect(char c) {
    skip();
    if (at_end() || peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  std::string_view s_;
  std::vector<std::string> names_;
  std::size_t pos_ = 0;
};

}  // namespace

GroupPresentation parse_presentation(std::string_view text) {
  return PresentationParser(text, {}).parse_full();
}

Word parse_word(std::string_view text, const std::vector<std::string>& names) {
  return PresentationParser(text, names).parse_single();
}

std::string word_to_string(const Word& w, const std::vector<std::string>& names) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const int run = static_cast<int>(j - i) * (w[i] > 0 ? 1 : -1);
    const auto idx = static_cast<std::size_t>(std::abs(w[i]) - 1);
    if (idx >= names.size()) throw DimensionError("letter out of range in word");
    if (!out.empty()) out += "*";
    out += names[idx];
    if (run != 1) out += "^" + std::to_string(run);
    i = j;
  }
  return out;
}

std::string to_string(const GroupPresentation& p) {
  std::string out = "gens: ";
  for (std::size_t i = 0; i < p.generators.size(); ++i) out += (i ? "," : "") + p.generators[i];
  out += "; rels: ";
  for (std::size_t i = 0; i < p.relators.size(); ++i)
    out += (i ? ", " : "") + word_to_string(p.relators[i], p.generators);
  return out;
}

void validate(const GroupPresentation& p) {
  const int n = static_cast<int>(p.generators.size());
  for (const auto& r : p.relators)
    for (int l : r)
      if (l == 0 || std::abs(l) > n) throw DimensionError("relator letter out of range");
}

// ---------------------------------------------------------------------------
// Abelianization

IntMatrix exponent_sum_matrix(const GroupPresentation& p) {
  validate(p);
  IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(p.relators.size()),
                                static_cast<Eigen::Index>(p.generators.size()));
  for (std::size_t i = 0; i < p.relators.size(); ++i)
    for (int l : p.relators[i]) m(static_cast<Eigen::Index>(i), std::abs(l) - 1) += l > 0 ? 1 : -1;
  return m;
}

AbelianInvariants abelianization(const GroupPresentation& p) {
  AbelianInvariants out;
  const auto snf = smith_normal_form(exponent_sum_matrix(p));
  out.free_rank = p.generators.size() - snf.factors.size();
  for (const auto& d : snf.factors)
    if (d > 1) out.torsion.push_back(d);
  return out;
}

GroupPresentation quotient_by_normal_closure(const GroupPresentation& p, const std::vector<Word>& words) {
  GroupPresentation out = p;
  const int n = static_cast<int>(p.generators.size());
  for (const auto& w : words) {
    for (int l : w)
      if (l == 0 || std::abs(l) > n) throw DimensionError("word uses a generator outside the presentation");
    out.relators.push_back(cyclic_reduce(w));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tietze engine

namespace {

std::size_t occurrences(const Word& w, int gen) {
  return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [gen](int l) { return std::abs(l) == gen; }));
}

// Solve r = u g^e v = 1 for g.
Word defining_word(const Word& r, int gen) {
  auto it = std::find_if(r.begin(), r.end(), [gen](int l) { return std::abs(l) == gen; });
  const Word u(r.begin(), it);
  const Word v(it + 1, r.end());
  if (*it > 0) return free_reduce(concat(inverse(u), inverse(v)));
  return free_reduce(concat(v, u));
}

Word substitute(const Word& w, int gen, const Word& def) {
  Word out;
  const Word inv = inverse(def);
  for (int l : w) {
    if (l == gen) out.insert(out.end(), def.begin(), def.end());
    else if (l == -gen) out.insert(out.end(), inv.begin(), inv.end());
    else out.push_back(l);
  }
  return free_reduce(out);
}

std::optional<TietzeMove> next_move(const GroupPresentation& p, const TietzeOptions& opts) {
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    Word c = cyclic_reduce(p.relators[i]);
    if (c != p.relators[i]) return TietzeMove{TietzeMove::Kind::replace_relator, i, 0, std::move(c)};
  }
  for (std::size_t i = 0; i < p.relators.size(); ++i)
    if (p.relators[i].empty()) return TietzeMove{TietzeMove::Kind::remove_relator, i, 0, {}};
  std::map<Word, std::size_t> seen;
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    if (!seen.emplace(canonical_cyclic(p.relators[i]), i).second)
      return TietzeMove{TietzeMove::Kind::remove_relator, i, 0, {}};
  }
  std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> best;  // (length, gen, relator)
  for (std::size_t i = 0; i < p.relators.size(); ++i) {
    const auto& r = p.relators[i];
    if (r.size() > opts.max_relator_length) continue;
    for (std::size_t g = 1; g <= p.generators.size(); ++g)
      if (occurrences(r, static_cast<int>(g)) == 1) {
        auto cand = std::make_tuple(r.size(), g - 1, i);
        if (!best || cand < *best) best = cand;
      }
  }
  if (best) {
    const auto [len, g, i] = *best;
    return TietzeMove{TietzeMove::Kind::eliminate_generator, i, g,
                      defining_word(p.relators[i], static_cast<int>(g + 1))};
  }
  return std::nullopt;
}

}  // namespace

GroupPresentation apply_move(const GroupPresentation& p, const TietzeMove& m) {
  if (m.relator >= p.relators.size()) throw PreconditionError("Tietze move refers to a missing relator");
  GroupPresentation out = p;
  const Word& r = p.relators[m.relator];
  switch (m.kind) {
    case TietzeMove::Kind::replace_relator:
      if (m.word != cyclic_reduce(r)) throw PreconditionError("replacement is not the cyclic reduction");
      out.relators[m.relator] = m.word;
      return out;
    case TietzeMove::Kind::remove_relator: {
      bool redundant = r.empty();
      const Word key = canonical_cyclic(r);
      for (std::size_t j = 0; j < p.relators.size() && !redundant; ++j)
        if (j != m.relator && canonical_cyclic(p.relators[j]) == key) redundant = true;
      if (!redundant) throw PreconditionError("removed relator is neither empty nor a duplicate");
      out.relators.erase(out.relators.begin() + static_cast<long>(m.relator));
      return out;
    }
    case TietzeMove::Kind::eliminate_generator: {
      const int gen = static_cast<int>(m.generator) + 1;
      if (m.generator >= p.generators.size()) throw PreconditionError("eliminated generator out of range");
      if (occurrences(r, gen) != 1) throw PreconditionError("defining relator must contain the generator once");
      if (defining_word(r, gen) != m.word) throw PreconditionError("defining word does not solve the relator");
      out.relators.erase(out.relators.begin() + static_cast<long>(m.relator));
      for (auto& w : out.relators) {
        w = substitute(w, gen, m.word);
        for (auto& l : w)
          if (std::abs(l) > gen) l += l > 0 ? -1 : 1;
      }
      out.generators.erase(out.generators.begin() + static_cast<long>(m.generator));
      return out;
    }
  }
  return out;
}

TietzeResult tietze_simplify(const GroupPresentation& p, const TietzeOptions& opts) {
  validate(p);
  TietzeResult res{p, {}};
  while (auto m = next_move(res.presentation, opts)) {
    if (res.log.moves.size() >= opts.move_budget) {
      res.log.budget_exhausted = true;
      break;
    }
    res.presentation = apply_move(res.presentation, *m);
    res.log.moves.push_back(std::move(*m));
  }
  return res;
}

GroupPresentation replay(const GroupPresentation& source, const TietzeLog& log) {
  GroupPresentation p = source;
  for (const auto& m : log.moves) p = apply_move(p, m);
  return p;
}

std::optional<std::size_t> recognize_free(const GroupPresentation& p, const TietzeOptions& opts) {
  const auto ab = abelianization(p);
  if (!ab.torsion.empty()) return std::nullopt;
  const auto res = tietze_simplify(p, opts);
  if (!res.presentation.relators.empty()) return std::nullopt;
  if (res.presentation.generators.size() != ab.free_rank)
    throw ConstructionError("free presentation disagrees with the abelianization");
  return res.presentation.generators.size();
}

Word surface_relator(std::size_t g, int first_index) {
  Word w;
  for (std::size_t i = 0; i < g; ++i) {
    const int a = first_index + static_cast<int>(2 * i);
    const int b = a + 1;
    w.insert(w.end(), {a, b, -a, -b});
  }
  return w;
}

SurfaceRecognition recognize_surface(const GroupPresentation& p, std::size_t g, const TietzeOptions& opts,
                                     std::size_t max_genus) {
  SurfaceRecognition out;
  if (g == 0 || g > max_genus) return out;
  const auto res = tietze_simplify(p, opts);
  const auto& q = res.presentation;
  if (q.generators.size() != 2 * g || q.relators.size() != 1 || q.relators[0].size() != 4 * g) return out;
  const Word& rel = q.relators[0];
  for (bool inv : {false, true}) {
    const Word base = inv ? inverse(rel) : rel;
    for (std::size_t rot = 0; rot < base.size(); ++rot) {
      // Matching against a1 b1 a1^-1 b1^-1 ... forces the relabeling letter by letter.
      std::vector<std::pair<std::size_t, int>> assign(2 * g, {0, 0});
      std::set<std::size_t> used;
      bool ok = true;
      for (std::size_t k = 0; k < 4 * g && ok; ++k) {
        const int letter = base[(rot + k) % base.size()];
        const std::size_t slot = 2 * (k / 4) + (k % 2);
        const int pattern_sign = (k % 4) < 2 ? 1 : -1;
        const auto gen = static_cast<std::size_t>(std::abs(letter) - 1);
        const int s = (letter > 0 ? 1 : -1) * pattern_sign;
        if (assign[slot].second == 0) {
          if (!used.insert(gen).second) ok = false;
          assign[slot] = {gen, s};
        } else if (assign[slot] != std::make_pair(gen, s)) {
          ok = false;
        }
      }
      if (ok) {
        out.recognized = true;
        out.assignment = assign;
        out.inverted = inv;
        out.rotation = rot;
        return out;
      }
    }
  }
  return out;
}

GroupPresentation pi1_Ng(std::size_t g) {
  if (g < 1) throw PreconditionError("genus must be at least 1");
  GroupPresentation p;
  p.generators = {"x", "y"};
  for (std::size_t i = 1; i <= g; ++i) {
    p.generators.push_back("a" + std::to_string(i));
    p.generators.push_back("b" + std::to_string(i));
  }
  const Word x{1}, y{2};
  auto a = [](std::size_t i) { return Word{static_cast<int>(2 * i + 1)}; };
  auto b = [](std::size_t i) { return Word{static_cast<int>(2 * i + 2)}; };
  p.relators.push_back(commutator(x, y));
  for (std::size_t i = 1; i <= g; ++i) {
    p.relators.push_back(commutator(x, a(i)));
    p.relators.push_back(commutator(x, b(i)));
  }
  for (std::size_t i = 1; i <= g; ++i) {
    p.relators.push_back(commutator(y, a(i)));
    p.relators.push_back(concat(commutator(y, b(i)), inverse(a(i))));
  }
  p.relators.push_back(surface_relator(g, 3));
  return p;
}

Word shift_word(const Word& w, int offset) {
  Word out = w;
  for (auto& l : out) l += l > 0 ? offset : -offset;
  return out;
}

std::string fresh_name(const std::string& name, const std::set<std::string>& taken) {
  std::string n = name;
  while (taken.count(n)) {
    std::size_t d = n.size();
    while (d > 0 && std::isdigit(static_cast<unsigned char>(n[d - 1]))) --d;
    if (d < n.size() && n.size() - d < 9)
      n = n.substr(0, d) + std::to_string(std::stol(n.substr(d)) + 1);
    else
      n += "'";
  }
  return n;
}

GroupPresentation free_product(const GroupPresentation& a, const GroupPresentation& b) {
  validate(a);
  validate(b);
  GroupPresentation out = a;
  std::set<std::string> names(a.generators.begin(), a.generators.end());
  for (const auto& n : b.generators) {
    out.generators.push_back(fresh_name(n, names));
    names.insert(out.generators.back());
  }
  const int off = static_cast<int>(a.generators.size());
  for (const auto& r : b.relators) out.relators.push_back(shift_word(r, off));
  return out;
}

GroupPresentation svk_glue(const GroupPresentation& p1, const GroupPresentation& p2,
                           const std::vector<std::pair<Word, Word>>& peripheral_pairs) {
  GroupPresentation out = free_product(p1, p2);
  const int n1 = static_cast<int>(p1.generators.size());
  const int n2 = static_cast<int>(p2.generators.size());
  for (const auto& [w1, w2] : peripheral_pairs) {
    for (int l : w1)
      if (l == 0 || std::abs(l) > n1) throw DimensionError("peripheral word invalid in the first presentation");
    for (int l : w2)
      if (l == 0 || std::abs(l) > n2) throw DimensionError("peripheral word invalid in the second presentation");
    Word rel = cyclic_reduce(concat(w1, inverse(shift_word(w2, n1))));
    if (!rel.empty()) out.relators.push_back(std::move(rel));
  }
  return out;
}

}  // namespace twolink
