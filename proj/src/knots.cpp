#include "twolink/knots.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <numeric>

namespace twolink {

BraidWord parse_braid(std::string_view text) {
  BraidWord b;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto number = [&](const char* what) {
    const auto start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw ParseError(std::string("expected ") + what, start);
    if (pos - start > 6) throw ParseError(std::string(what) + " too large", start);
    return std::stoi(std::string(text.substr(start, pos - start)));
  };
  skip();
  b.strands = number("strand count");
  if (b.strands < 1) throw ParseError("strand count must be positive", 0);
  skip();
  if (pos >= text.size() || text[pos] != ':') throw ParseError("expected ':' after strand count", pos);
  ++pos;
  while (true) {
    skip();
    if (pos >= text.size()) break;
    const auto tok = pos;
    if (text[pos] != 's') throw ParseError("expected generator 's<i>'", pos);
    ++pos;
    const int idx = number("generator index");
    if (idx < 1 || idx >= b.strands)
      throw ParseError("generator index " + std::to_string(idx) + " out of range for " +
                           std::to_string(b.strands) + " strands",
                       tok);
    int k = 1;
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      int sgn = 1;
      if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        sgn = text[pos] == '-' ? -1 : 1;
        ++pos;
      }
      k = sgn * number("exponent");
      if (k == 0) throw ParseError("zero exponent", tok);
    }
    if (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])))
      throw ParseError("malformed token", tok);
    for (int j = 0; j < std::abs(k); ++j) b.letters.push_back(k > 0 ? idx : -idx);
  }
  return b;
}

std::string to_string(const BraidWord& b) {
  std::string out = std::to_string(b.strands) + ":";
  for (std::size_t i = 0; i < b.letters.size();) {
    std::size_t j = i;
    while (j < b.letters.size() && b.letters[j] == b.letters[i]) ++j;
    const int run = static_cast<int>(j - i) * (b.letters[i] > 0 ? 1 : -1);
    out += " s" + std::to_string(std::abs(b.letters[i]));
    if (run != 1) out += "^" + std::to_string(run);
    i = j;
  }
  return out;
}

int closure_components(const BraidWord& b) {
  std::vector<int> perm(static_cast<std::size_t>(b.strands));
  std::iota(perm.begin(), perm.end(), 0);
  for (int l : b.letters) {
    const auto p = static_cast<std::size_t>(std::abs(l) - 1);
    std::swap(perm[p], perm[p + 1]);
  }
  std::vector<bool> seen(perm.size(), false);
  int cycles = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    ++cycles;
    for (auto j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
  }
  return cycles;
}

namespace {

using PolyMatrix = std::vector<std::vector<GroupRingElement>>;

PolyMatrix identity(std::size_t n) {
  PolyMatrix m(n, std::vector<GroupRingElement>(n, GroupRingElement(1)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = GroupRingElement::constant(1, 1);
  return m;
}

PolyMatrix product(const PolyMatrix& a, const PolyMatrix& b) {
  const auto n = a.size();
  PolyMatrix out(n, std::vector<GroupRingElement>(n, GroupRingElement(1)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!b[k][j].is_zero()) out[i][j] = out[i][j] + a[i][k] * b[k][j];
    }
  return out;
}

// Reduced Burau image of sigma_i^{+-1}; only row k = i-1 differs from the identity.
PolyMatrix burau_letter(int strands, int letter) {
  const auto n = static_cast<std::size_t>(strands - 1);
  PolyMatrix m = identity(n);
  const auto k = static_cast<std::size_t>(std::abs(letter) - 1);
  const auto t = GroupRingElement::univariate({{1, 1}});
  const auto mt = GroupRingElement::univariate({{1, -1}});
  const auto tinv = GroupRingElement::univariate({{-1, 1}});
  const auto mtinv = GroupRingElement::univariate({{-1, -1}});
  const auto one = GroupRingElement::constant(1, 1);
  if (letter > 0) {
    m[k][k] = mt;
    if (k > 0) m[k][k - 1] = t;
    if (k + 1 < n) m[k][k + 1] = one;
  } else {
    m[k][k] = mtinv;
    if (k > 0) m[k][k - 1] = one;
    if (k + 1 < n) m[k][k + 1] = tinv;
  }
  return m;
}

// Permutation expansion over column subsets; no division needed.
GroupRingElement laplace_det(const PolyMatrix& a) {
  const auto n = a.size();
  std::vector<GroupRingElement> dp(std::size_t{1} << n, GroupRingElement(1));
  dp[0] = GroupRingElement::constant(1, 1);
  for (std::size_t mask = 0; mask < dp.size(); ++mask) {
    if (dp[mask].is_zero()) continue;
    const auto row = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (row == n) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (mask & (std::size_t{1} << c) || a[row][c].is_zero()) continue;
      const auto above = static_cast<unsigned>(__builtin_popcountll(mask >> (c + 1)));
      GroupRingElement term = dp[mask] * a[row][c];
      if (above % 2) term = term.negated();
      auto& slot = dp[mask | (std::size_t{1} << c)];
      slot = slot + term;
    }
  }
  return dp.back();
}

// Fraction-free Gaussian elimination with exact polynomial division.
GroupRingElement bareiss_det(PolyMatrix m) {
  const auto n = m.size();
  if (n == 0) return GroupRingElement::constant(1, 1);
  GroupRingElement prev = GroupRingElement::constant(1, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t r = k + 1;
      while (r < n && m[r][k].is_zero()) ++r;
      if (r == n) return GroupRingElement(1);
      std::swap(m[k], m[r]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = divide_exact(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
    prev = m[k][k];
  }
  return negate ? m[n - 1][n - 1].negated() : m[n - 1][n - 1];
}

}  // namespace

GroupRingElement alexander_poly(const BraidWord& b) {
  const int comps = closure_components(b);
  if (comps != 1)
    throw PreconditionError("braid closure has " + std::to_string(comps) + " components, expected a knot");
  const auto n = static_cast<std::size_t>(b.strands - 1);
  PolyMatrix rho = identity(n);
  for (int l : b.letters) rho = product(rho, burau_letter(b.strands, l));
  PolyMatrix im = identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) im[i][j] = im[i][j] - rho[i][j];
  const GroupRingElement det = laplace_det(im);
  const auto one_minus_t = GroupRingElement::univariate({{0, 1}, {1, -1}});
  const auto one_minus_tn = GroupRingElement::univariate({{0, 1}, {b.strands, -1}});
  return normalize_alexander(divide_exact(det * one_minus_t, one_minus_tn));
}

GroupPresentation wirtinger_presentation(const BraidWord& b) {
  std::vector<int> at(static_cast<std::size_t>(b.strands));
  std::iota(at.begin(), at.end(), 0);
  int next = b.strands;
  std::vector<std::array<int, 4>> raw;  // (a, sign of a, b, c): a^e b a^-e c^-1
  for (int l : b.letters) {
    const auto p = static_cast<std::size_t>(std::abs(l) - 1);
    const int c = next++;
    if (l > 0) {
      const int over = at[p], under = at[p + 1];
      raw.push_back({over, 1, under, c});
      at[p] = c;
      at[p + 1] = over;
    } else {
      const int over = at[p + 1], under = at[p];
      raw.push_back({over, -1, under, c});
      at[p] = over;
      at[p + 1] = c;
    }
  }
  // Closing the braid identifies each final arc with the initial arc in its position.
  std::vector<int> parent(static_cast<std::size_t>(next));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int k = 0; k < b.strands; ++k) parent[find(at[k])] = find(k);
  std::vector<int> id(static_cast<std::size_t>(next), -1);
  GroupPresentation p;
  for (int x = 0; x < next; ++x) {
    const int r = find(x);
    if (id[r] < 0) {
      id[r] = static_cast<int>(p.generators.size());
      p.generators.push_back("x" + std::to_string(p.generators.size() + 1));
    }
  }
  auto gen = [&](int arc) { return id[find(arc)] + 1; };
  for (const auto& [a, e, u, c] : raw) p.relators.push_back({e * gen(a), gen(u), -e * gen(a), -gen(c)});
  return p;
}

GroupPresentation wirtinger_connected_sum(const GroupPresentation& k1, const GroupPresentation& k2) {
  if (k1.generators.empty() || k2.generators.empty()) throw PreconditionError("knot group needs a meridian");
  GroupPresentation out = k1;
  const int n1 = static_cast<int>(k1.generators.size());
  // Generator 1 of k2 becomes generator 1 of k1; the rest follow k1's generators.
  auto map = [&](int l) {
    const int g = std::abs(l);
    const int img = g == 1 ? 1 : n1 + g - 1;
    return l > 0 ? img : -img;
  };
  for (std::size_t i = 1; i < k2.generators.size(); ++i)
    out.generators.push_back("y" + std::to_string(i + 1));
  for (const auto& r : k2.relators) {
    Word w;
    for (int l : r) w.push_back(map(l));
    out.relators.push_back(w);
  }
  return out;
}

GroupRingElement fox_calculus_oracle(const GroupPresentation& wirtinger) {
  validate(wirtinger);
  for (const auto& r : wirtinger.relators) {
    int sum = 0;
    for (int l : r) sum += l > 0 ? 1 : -1;
    if (r.size() != 4 || sum != 0) throw PreconditionError("presentation is not Wirtinger-shaped");
  }
  const auto g = wirtinger.generators.size();
  if (g == 0) throw PreconditionError("presentation has no meridians");
  const auto rows = wirtinger.relators.size();
  // Abelianized Fox derivatives, first column deleted.
  PolyMatrix jac(rows, std::vector<GroupRingElement>(g - 1, GroupRingElement(1)));
  for (std::size_t i = 0; i < rows; ++i) {
    std::int64_t e = 0;
    for (int l : wirtinger.relators[i]) {
      const auto col = static_cast<std::size_t>(std::abs(l) - 1);
      if (l > 0) {
        if (col > 0) jac[i][col - 1] = jac[i][col - 1] + GroupRingElement::univariate({{e, 1}});
        ++e;
      } else {
        --e;
        if (col > 0) jac[i][col - 1] = jac[i][col - 1] + GroupRingElement::univariate({{e, -1}});
      }
    }
  }
  if (rows < g - 1) return GroupRingElement(1);
  // gcd over all (g-1)-row subsets; enumerate by dropping rows when rows > g-1.
  GroupRingElement acc(1);
  std::vector<bool> pick(rows, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(g - 1), true);
  do {
    PolyMatrix minor;
    for (std::size_t i = 0; i < rows; ++i)
      if (pick[i]) minor.push_back(jac[i]);
    acc = poly_gcd(acc, bareiss_det(minor));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return normalize_alexander(acc);
}

BraidWord twist_knot_braid(int n) {
  if (n < 0) throw PreconditionError("twist knot index must be nonnegative");
  BraidWord b;
  if (n == 0) return b;
  if (n % 2 == 1) {
    const int m = (n - 1) / 2;
    b.strands = m + 2;
    b.letters = {1, 1, 1};
    for (int i = 1; i <= m; ++i) b.letters.insert(b.letters.end(), {i + 1, -i, i + 1});
    return b;
  }
  const int m = n / 2;
  if (m == 1) return BraidWord{3, {1, -2, 1, -2}};
  b.strands = m + 2;
  b.letters = {1, 1};
  for (int i = 2; i <= m - 1; ++i) b.letters.insert(b.letters.end(), {i, -(i - 1), i});
  b.letters.insert(b.letters.end(), {m, -(m - 1), -(m + 1), m, -(m + 1)});
  return b;
}

KnotRecord make_knot(const std::string& name, const BraidWord& b) {
  return KnotRecord{name, b, alexander_poly(b)};
}

void require_distinct_alexander(const std::vector<KnotRecord>& family) {
  for (std::size_t i = 0; i < family.size(); ++i)
    for (std::size_t j = i + 1; j < family.size(); ++j)
      if (equal_up_to_units(family[i].alexander, family[j].alexander, true))
        throw ConstructionError("knots " + family[i].name + " and " + family[j].name +
                                " have the same Alexander polynomial " + to_string(family[i].alexander));
}

std::vector<KnotRecord> twist_knot_family(int count) {
  if (count < 1) throw PreconditionError("family size must be at least 1");
  std::vector<KnotRecord> out;
  for (int n = 0; n < count; ++n)
    out.push_back(make_knot(n == 0 ? "unknot" : "twist_" + std::to_string(n), twist_knot_braid(n)));
  require_distinct_alexander(out);
  return out;
}

}  // namespace twolink
