#include "twolink/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace twolink {

IntMatrix hyperbolic_plane() { return from_rows({{0, 1}, {1, 0}}); }

IntMatrix e8(bool negative) {
  // Dynkin diagram: chain 0-1-2-3-4-5-6 with node 7 attached to node 4.
  IntMatrix q = IntMatrix::Zero(8, 8);
  const int d = negative ? -2 : 2;
  const int o = negative ? 1 : -1;
  for (int i = 0; i < 8; ++i) q(i, i) = d;
  const std::array<std::pair<int, int>, 7> edges{{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {4, 7}}};
  for (auto [i, j] : edges) q(i, j) = q(j, i) = o;
  return q;
}

Integer determinant(const IntMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("determinant of a non-square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Integer prev = 1;
  int sgn = 1;
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      Eigen::Index r = k + 1;
      while (r < n && m(r, k) == 0) ++r;
      if (r == n) return 0;
      m.row(k).swap(m.row(r));
      sgn = -sgn;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sgn * m(n - 1, n - 1);
}

Eigen::Index matrix_rank(const IntMatrix& a) {
  IntMatrix m = a;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < m.cols() && r < m.rows(); ++c) {
    Eigen::Index p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.row(r).swap(m.row(p));
    for (Eigen::Index i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      const Integer f = m(i, c), g = m(r, c);
      m.row(i) = (g * m.row(i) - f * m.row(r)).eval();
      const Integer cont = [&] {
        Integer h = 0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) h = gcd(h, m(i, j));
        return h;
      }();
      if (cont > 1) m.row(i) /= cont;
    }
    ++r;
  }
  return r;
}

FormInvariants invariants(const IntMatrix& q) {
  if (!is_symmetric(q)) throw DimensionError("intersection form must be square and symmetric");
  FormInvariants inv;
  const Eigen::Index n = q.rows();
  inv.dimension = n;
  for (Eigen::Index i = 0; i < n; ++i)
    if (q(i, i) % 2 != 0) inv.even = false;
  inv.determinant = determinant(q);
  inv.unimodular = abs(inv.determinant) == 1;

  // Symmetric elimination. Each Schur step replaces the trailing block B by
  // p*B - a a^T, which scales the true complement by p; `scale` remembers the sign.
  IntMatrix a = q;
  std::vector<Eigen::Index> active(n);
  for (Eigen::Index i = 0; i < n; ++i) active[i] = i;
  int scale = 1;
  while (!active.empty()) {
    Eigen::Index piv = -1;
    for (auto i : active)
      if (a(i, i) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) {
      Eigen::Index ii = -1, jj = -1;
      for (auto i : active)
        for (auto j : active)
          if (ii < 0 && i != j && a(i, j) != 0) {
            ii = i;
            jj = j;
          }
      if (ii < 0) break;  // remaining block is zero
      a.row(ii) += a.row(jj);
      a.col(ii) += a.col(jj);
      piv = ii;
    }
    const Integer p = a(piv, piv);
    const int s = sign(p) * scale;
    (s > 0 ? inv.b_plus : inv.b_minus) += 1;
    std::erase(active, piv);
    for (auto i : active)
      for (auto j : active)
        if (i <= j) {
          a(i, j) = p * a(i, j) - a(i, piv) * a(piv, j);
          a(j, i) = a(i, j);
        }
    scale *= sign(p);
    Integer cont = 0;
    for (auto i : active)
      for (auto j : active) cont = gcd(cont, a(i, j));
    if (cont > 1)
      for (auto i : active)
        for (auto j : active) a(i, j) /= cont;
  }
  inv.rank = inv.b_plus + inv.b_minus;
  inv.signature = inv.b_plus - inv.b_minus;
  return inv;
}

bool indefinite_unimodular_iso(const IntMatrix& q1, const IntMatrix& q2) {
  const auto i1 = invariants(q1);
  const auto i2 = invariants(q2);
  for (const auto* inv : {&i1, &i2}) {
    if (!inv->unimodular) throw PreconditionError("form is not unimodular; classification does not apply");
    if (!inv->indefinite()) throw PreconditionError("form is definite; classification does not apply");
  }
  return i1.rank == i2.rank && i1.signature == i2.signature && i1.even == i2.even;
}

AdmissibleReport admissible_check(const IntMatrix& q, const IntVector& t1, const IntVector& s1,
                                  const IntVector& t2, const IntVector& s2) {
  AdmissibleReport rep;
  rep.form = invariants(q);
  for (const auto* v : {&t1, &s1, &t2, &s2})
    if (v->size() != q.rows()) throw DimensionError("class vector length does not match the form");
  auto fail = [&](const std::string& clause, const std::string& detail) {
    rep.ok = false;
    rep.violations.push_back(clause + ": " + detail);
  };
  auto dot = [&](const IntVector& u, const IntVector& v) { return pairing(q, u, v); };
  if (dot(t1, t1) != 0) fail("square-zero tori", "[T1].[T1] = " + to_string(dot(t1, t1)));
  if (dot(t2, t2) != 0) fail("square-zero tori", "[T2].[T2] = " + to_string(dot(t2, t2)));
  if (dot(t1, s1) != 1) fail("dual classes", "[T1].[S1] = " + to_string(dot(t1, s1)));
  if (dot(t2, s2) != 1) fail("dual classes", "[T2].[S2] = " + to_string(dot(t2, s2)));
  if (dot(t1, t2) != 0) fail("disjoint tori", "[T1].[T2] = " + to_string(dot(t1, t2)));
  if (dot(t1, s2) != 0) fail("dual classes", "[T1].[S2] = " + to_string(dot(t1, s2)));
  if (dot(t2, s1) != 0) fail("dual classes", "[T2].[S1] = " + to_string(dot(t2, s1)));
  const auto& f = rep.form;
  if (f.rank < std::abs(f.signature) + 4)
    fail("b2 >= |sigma| + 4", "b2 = " + std::to_string(f.rank) + ", sigma = " + std::to_string(f.signature));
  if (!f.indefinite())
    fail("indefinite intersection form", "b+ = " + std::to_string(f.b_plus) + ", b- = " + std::to_string(f.b_minus));
  return rep;
}

AdmissibleReport admissible_check(const IntMatrix& q, const std::array<Eigen::Index, 4>& classes) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (classes[i] < 0 || classes[i] >= q.rows()) throw PreconditionError("class index out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (classes[i] == classes[j]) throw PreconditionError("class indices must be distinct");
  }
  const auto n = q.rows();
  return admissible_check(q, unit_vector<Integer>(n, classes[0]), unit_vector<Integer>(n, classes[1]),
                          unit_vector<Integer>(n, classes[2]), unit_vector<Integer>(n, classes[3]));
}

std::optional<IntVector> complement_nonspin_witness(const IntMatrix& q, const IntVector& alpha,
                                                    const IntVector& t2, const IntVector& s2) {
  if (pairing(q, s2, t2) != 1) throw PreconditionError("S2.T2 must be 1");
  if (pairing(q, s2, s2) % 2 != 0) throw PreconditionError("S2.S2 must be even");
  if (pairing(q, t2, t2) != 0) throw PreconditionError("T2.T2 must be 0");
  const Integer aa = pairing(q, alpha, alpha);
  if (aa % 2 == 0) return std::nullopt;
  IntVector sigma = alpha - pairing(q, alpha, t2) * s2;
  if (pairing(q, sigma, sigma) % 2 == 0 || pairing(q, sigma, t2) != 0)
    throw ConstructionError("witness failed its own verification");
  return sigma;
}

std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b) {
  if (b.size() != a.rows()) throw DimensionError("right-hand side length mismatch");
  const auto snf = smith_normal_form(a);
  // U A V = D, so A x = b  <=>  D y = U b with x = V y.
  const IntVector ub = snf.U * b;
  IntVector y = IntVector::Zero(a.cols());
  for (Eigen::Index i = 0; i < ub.size(); ++i) {
    const bool has_factor = i < static_cast<Eigen::Index>(snf.factors.size());
    if (!has_factor) {
      if (ub(i) != 0) return std::nullopt;
      continue;
    }
    if (ub(i) % snf.factors[i] != 0) return std::nullopt;
    y(i) = ub(i) / snf.factors[i];
  }
  return IntVector(snf.V * y);
}

IntMatrix hermite_row_basis(const IntMatrix& rows) {
  IntMatrix m = rows;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < m.cols() && r < m.rows(); ++c) {
    // Euclid down the column until a single nonzero entry remains at row r.
    while (true) {
      Eigen::Index p = -1;
      for (Eigen::Index i = r; i < m.rows(); ++i)
        if (m(i, c) != 0 && (p < 0 || abs(m(i, c)) < abs(m(p, c)))) p = i;
      if (p < 0) break;
      m.row(r).swap(m.row(p));
      bool done = true;
      for (Eigen::Index i = r + 1; i < m.rows(); ++i) {
        if (m(i, c) == 0) continue;
        const Integer qq = detail::floor_div(m(i, c), m(r, c));
        m.row(i) -= qq * m.row(r);
        if (m(i, c) != 0) done = false;
      }
      if (done) break;
    }
    if (r < m.rows() && m(r, c) != 0) {
      if (m(r, c) < 0) m.row(r) *= Integer(-1);
      ++r;
    }
  }
  return m.topRows(r);
}

PairComplement orthogonal_complement_of_pair(const IntMatrix& q, const IntVector& t, const IntVector& s) {
  const Eigen::Index n = q.rows();
  if (pairing(q, t, t) != 0 || pairing(q, t, s) != 1)
    throw PreconditionError("torus class must have square 0 and pair to 1 with its dual");
  if (abs(determinant(q)) != 1) throw PreconditionError("form must be unimodular to split off a pair");
  const Integer ss = pairing(q, s, s);
  PairComplement out;
  IntMatrix proj(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const IntVector e = unit_vector<Integer>(n, j);
    const Integer beta = pairing(q, e, t);
    const Integer alpha = pairing(q, e, s) - ss * beta;
    out.alpha.push_back(alpha);
    out.beta.push_back(beta);
    proj.row(j) = (e - alpha * t - beta * s).transpose();
  }
  std::vector<Eigen::Index> unchanged;
  for (Eigen::Index j = 0; j < n; ++j)
    if (proj.row(j) == unit_vector<Integer>(n, j).transpose()) unchanged.push_back(j);
  IntMatrix basis;
  if (static_cast<Eigen::Index>(unchanged.size()) == n - 2) {
    basis.resize(n - 2, n);
    for (Eigen::Index k = 0; k < n - 2; ++k) basis.row(k) = proj.row(unchanged[k]);
    out.kept = unchanged;
  } else {
    basis = hermite_row_basis(proj);
    out.kept.assign(basis.rows(), -1);
    for (Eigen::Index k = 0; k < basis.rows(); ++k)
      for (Eigen::Index j = 0; j < n; ++j)
        if (basis.row(k) == unit_vector<Integer>(n, j).transpose()) out.kept[k] = j;
  }
  if (basis.rows() != n - 2) throw ConstructionError("orthogonal complement has unexpected rank");
  out.basis = basis;
  out.form = basis * q * basis.transpose();
  if (abs(determinant(out.form)) != 1) throw ConstructionError("orthogonal complement is not unimodular");
  out.coords.resize(n - 2, n);
  const IntMatrix bt = basis.transpose();
  const bool unit_basis = std::none_of(out.kept.begin(), out.kept.end(), [](auto k) { return k < 0; });
  for (Eigen::Index j = 0; j < n; ++j) {
    if (unit_basis) {
      IntVector c(n - 2);
      for (Eigen::Index k = 0; k < n - 2; ++k) c(k) = proj(j, out.kept[k]);
      if (bt * c == proj.row(j).transpose()) {
        out.coords.col(j) = c;
        continue;
      }
    }
    auto c = solve_integer(bt, proj.row(j).transpose());
    if (!c) throw ConstructionError("projected class is not in the complement lattice");
    out.coords.col(j) = *c;
  }
  return out;
}

}  // namespace twolink
