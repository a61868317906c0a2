#include "twolink/groupring.hpp"

#include <algorithm>
#include <cctype>

namespace twolink {

namespace {

void require_same_rank(const GroupRingElement& a, const GroupRingElement& b) {
  if (a.rank() != b.rank())
    throw DimensionError("group ring rank mismatch: " + std::to_string(a.rank()) + " vs " +
                         std::to_string(b.rank()));
}

void require_univariate(const GroupRingElement& a) {
  if (a.rank() != 1) throw DimensionError("expected a one-variable element");
}

ExponentVector add_vec(const ExponentVector& a, const ExponentVector& b) {
  ExponentVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

// Dense coefficients c[0..d] of t^0..t^d; used by the gcd routine.
using Dense = std::vector<Integer>;

Dense to_dense(const GroupRingElement& a) {
  if (a.is_zero()) return {};
  const auto lo = a.min_exponent()[0];
  const auto hi = a.max_exponent()[0];
  Dense d(static_cast<std::size_t>(hi - lo + 1), Integer(0));
  for (const auto& [e, c] : a.terms()) d[static_cast<std::size_t>(e[0] - lo)] = c;
  return d;
}

GroupRingElement from_dense(const Dense& d) {
  GroupRingElement out(1);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] != 0) out.add_term({static_cast<std::int64_t>(i)}, d[i]);
  return out;
}

void trim(Dense& d) {
  while (!d.empty() && d.back() == 0) d.pop_back();
}

Integer content(const Dense& d) {
  Integer g = 0;
  for (const auto& c : d) g = gcd(g, c);
  return g;
}

Dense primitive(Dense d) {
  const Integer g = content(d);
  if (g > 1)
    for (auto& c : d) c /= g;
  return d;
}

Dense pseudo_remainder(Dense a, const Dense& b) {
  const auto db = b.size() - 1;
  const Integer lb = b.back();
  while (a.size() >= b.size()) {
    const Integer la = a.back();
    const auto shift = a.size() - 1 - db;
    for (auto& c : a) c *= lb;
    for (std::size_t i = 0; i <= db; ++i) a[i + shift] -= la * b[i];
    trim(a);
  }
  return a;
}

}  // namespace

GroupRingElement GroupRingElement::constant(std::size_t rank, const Integer& c) {
  GroupRingElement out(rank);
  out.add_term(ExponentVector(rank, 0), c);
  return out;
}

GroupRingElement GroupRingElement::monomial(const ExponentVector& e, const Integer& c) {
  GroupRingElement out(e.size());
  out.add_term(e, c);
  return out;
}

GroupRingElement GroupRingElement::univariate(
    const std::vector<std::pair<std::int64_t, long>>& terms) {
  GroupRingElement out(1);
  for (const auto& [e, c] : terms) out.add_term({e}, c);
  return out;
}

void GroupRingElement::add_term(const ExponentVector& e, const Integer& c) {
  if (e.size() != rank_) throw DimensionError("exponent vector length does not match rank");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Integer GroupRingElement::coefficient(const ExponentVector& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Integer(0) : it->second;
}

Integer GroupRingElement::augmentation() const {
  Integer s = 0;
  for (const auto& [e, c] : terms_) s += c;
  return s;
}

GroupRingElement GroupRingElement::inverted() const {
  GroupRingElement out(rank_);
  for (const auto& [e, c] : terms_) {
    ExponentVector n(e.size());
    std::transform(e.begin(), e.end(), n.begin(), [](auto x) { return -x; });
    out.terms_.emplace(std::move(n), c);
  }
  return out;
}

GroupRingElement GroupRingElement::shifted(const ExponentVector& u) const {
  if (u.size() != rank_) throw DimensionError("shift length does not match rank");
  GroupRingElement out(rank_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(add_vec(e, u), c);
  return out;
}

GroupRingElement GroupRingElement::negated() const {
  GroupRingElement out(*this);
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

const ExponentVector& GroupRingElement::min_exponent() const {
  if (terms_.empty()) throw PreconditionError("zero element has no exponents");
  return terms_.begin()->first;
}

const ExponentVector& GroupRingElement::max_exponent() const {
  if (terms_.empty()) throw PreconditionError("zero element has no exponents");
  return terms_.rbegin()->first;
}

GroupRingElement add(const GroupRingElement& a, const GroupRingElement& b) {
  require_same_rank(a, b);
  GroupRingElement out(a);
  for (const auto& [e, c] : b.terms()) out.add_term(e, c);
  return out;
}

GroupRingElement sub(const GroupRingElement& a, const GroupRingElement& b) {
  return add(a, b.negated());
}

GroupRingElement mul(const GroupRingElement& a, const GroupRingElement& b) {
  require_same_rank(a, b);
  GroupRingElement out(a.rank());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) out.add_term(add_vec(ea, eb), ca * cb);
  return out;
}

GroupRingElement pow(const GroupRingElement& a, unsigned n) {
  GroupRingElement out = GroupRingElement::constant(a.rank(), 1);
  for (unsigned i = 0; i < n; ++i) out = mul(out, a);
  return out;
}

GroupRingElement substitute_hom(const GroupRingElement& a, const ExpMatrix& h) {
  if (static_cast<std::size_t>(h.cols()) != a.rank())
    throw DimensionError("substitution matrix has " + std::to_string(h.cols()) +
                         " columns, element has rank " + std::to_string(a.rank()));
  const auto s = static_cast<std::size_t>(h.rows());
  GroupRingElement out(s);
  for (const auto& [e, c] : a.terms()) {
    ExponentVector img(s, 0);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < e.size(); ++j) img[i] += h(i, j) * e[j];
    out.add_term(img, c);
  }
  return out;
}

GroupRingElement embed_knot_poly_at_class(const GroupRingElement& delta, const ExponentVector& c) {
  require_univariate(delta);
  ExpMatrix h(static_cast<Eigen::Index>(c.size()), 1);
  for (std::size_t i = 0; i < c.size(); ++i) h(i, 0) = 2 * c[i];
  return substitute_hom(delta, h);
}

std::optional<UnitWitness> equal_up_to_units(const GroupRingElement& a, const GroupRingElement& b,
                                             bool allow_inversion) {
  require_same_rank(a, b);
  if (a.is_zero() || b.is_zero()) {
    if (a.is_zero() && b.is_zero()) return UnitWitness{1, ExponentVector(a.rank(), 0), false};
    return std::nullopt;
  }
  auto attempt = [&](const GroupRingElement& bb, bool inv) -> std::optional<UnitWitness> {
    if (bb.size() != a.size()) return std::nullopt;
    // A monomial shift preserves lexicographic order, so the smallest terms must match.
    ExponentVector u(a.rank());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = a.min_exponent()[i] - bb.min_exponent()[i];
    const Integer& ca = a.terms().begin()->second;
    const Integer& cb = bb.terms().begin()->second;
    int s = 0;
    if (ca == cb) s = 1;
    else if (ca == -cb) s = -1;
    else return std::nullopt;
    GroupRingElement candidate = bb.shifted(u);
    if (s < 0) candidate = candidate.negated();
    if (candidate == a) return UnitWitness{s, u, inv};
    return std::nullopt;
  };
  if (auto w = attempt(b, false)) return w;
  if (allow_inversion) return attempt(b.inverted(), true);
  return std::nullopt;
}

GroupRingElement divide_exact(const GroupRingElement& a, const GroupRingElement& b) {
  require_univariate(a);
  require_univariate(b);
  if (b.is_zero()) throw PreconditionError("division by zero polynomial");
  GroupRingElement rem = a;
  GroupRingElement q(1);
  const auto b_lo = b.min_exponent()[0];
  const auto b_hi = b.max_exponent()[0];
  const Integer& lb = b.terms().rbegin()->second;
  while (!rem.is_zero()) {
    if (rem.max_exponent()[0] - rem.min_exponent()[0] < b_hi - b_lo)
      throw PreconditionError("polynomial division is not exact");
    const auto hi = rem.max_exponent()[0];
    const Integer& lr = rem.terms().rbegin()->second;
    if (lr % lb != 0) throw PreconditionError("polynomial division is not exact over Z");
    GroupRingElement step = GroupRingElement::monomial({hi - b_hi}, lr / lb);
    q = add(q, step);
    rem = sub(rem, mul(step, b));
  }
  return q;
}

GroupRingElement poly_gcd(const GroupRingElement& a, const GroupRingElement& b) {
  require_univariate(a);
  require_univariate(b);
  if (a.is_zero() && b.is_zero()) return GroupRingElement(1);
  Dense pa = to_dense(a), pb = to_dense(b);
  const Integer c = gcd(content(pa), content(pb));
  pa = primitive(pa);
  pb = primitive(pb);
  if (pa.size() < pb.size()) std::swap(pa, pb);
  while (!pb.empty()) {
    Dense r = pseudo_remainder(pa, pb);
    pa = std::move(pb);
    pb = primitive(std::move(r));
  }
  if (pa.back() < 0)
    for (auto& x : pa) x = -x;
  for (auto& x : pa) x *= c;
  return from_dense(pa);
}

GroupRingElement normalize_alexander(const GroupRingElement& a) {
  require_univariate(a);
  if (a.is_zero()) return a;
  const auto lo = a.min_exponent()[0];
  const auto hi = a.max_exponent()[0];
  // floor((lo+hi)/2) so that an odd span leans towards positive exponents.
  auto mid = lo + hi;
  mid = mid >= 0 ? mid / 2 : -((-mid + 1) / 2);
  GroupRingElement out = a.shifted({-mid});
  const Integer aug = out.augmentation();
  if (aug < 0 || (aug == 0 && out.terms().rbegin()->second < 0)) out = out.negated();
  return out;
}

std::string to_string(const GroupRingElement& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = a.terms().rbegin(); it != a.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    std::string vars;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += a.rank() == 1 ? "t" : "t" + std::to_string(i + 1);
      if (e[i] != 1) vars += "^" + std::to_string(e[i]);
    }
    const bool negative = c < 0;
    const Integer mag = abs(c);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (vars.empty()) out += mag.str();
    else if (mag == 1) out += vars;
    else out += mag.str() + "*" + vars;
  }
  return out;
}

namespace {

class RingParser {
 public:
  RingParser(std::string_view s, std::size_t rank) : s_(s), rank_(rank) {}

  GroupRingElement parse() {
    GroupRingElement out(rank_);
    skip();
    if (at_end()) throw ParseError("empty group ring element", pos_);
    bool first = true;
    while (!at_end()) {
      int sgn = 1;
      if (peek() == '+' || peek() == '-') {
        sgn = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        throw ParseError("expected '+' or '-' between terms", pos_);
      }
      first = false;
      auto [e, c] = term();
      out.add_term(e, c * sgn);
      skip();
    }
    return out;
  }

 private:
  std::pair<ExponentVector, Integer> term() {
    ExponentVector e(rank_, 0);
    Integer c = 1;
    bool have_factor = false;
    while (true) {
      skip();
      if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
        c *= Integer(digits());
      } else if (!at_end() && peek() == 't') {
        ++pos_;
        std::size_t var = 0;
        if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
          const auto at = pos_;
          const auto idx = std::stoul(digits());
          if (idx < 1 || idx > rank_) throw ParseError("variable index out of range", at);
          var = idx - 1;
        } else if (rank_ != 1) {
          throw ParseError("variable needs an index when rank > 1", pos_);
        }
        std::int64_t ex = 1;
        skip();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip();
          int s = 1;
          if (!at_end() && (peek() == '-' || peek() == '+')) {
            s = peek() == '-' ? -1 : 1;
            ++pos_;
          }
          if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
            throw ParseError("expected exponent", pos_);
          ex = s * std::stoll(digits());
        }
        e[var] += ex;
      } else {
        throw ParseError("expected coefficient or variable", pos_);
      }
      have_factor = true;
      skip();
      if (!at_end() && peek() == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!have_factor) throw ParseError("empty term", pos_);
    return {e, c};
  }

  std::string digits() {
    const auto start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  std::string_view s_;
  std::size_t rank_;
  std::size_t pos_ = 0;
};

}  // namespace

GroupRingElement parse_group_ring(std::string_view text, std::size_t rank) {
  return RingParser(text, rank).parse();
}

}  // namespace twolink
