#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twolink/integer.hpp"

namespace twolink {

struct FormInvariants {
  Eigen::Index dimension = 0;
  Eigen::Index rank = 0;
  Eigen::Index signature = 0;
  Eigen::Index b_plus = 0;
  Eigen::Index b_minus = 0;
  bool even = true;
  bool unimodular = true;
  Integer determinant = 1;

  bool indefinite() const { return b_plus >= 1 && b_minus >= 1; }
  friend bool operator==(const FormInvariants&, const FormInvariants&) = default;
};

template <class Scalar>
bool is_symmetric(const Matrix<Scalar>& q) {
  return q.rows() == q.cols() && q == q.transpose();
}

template <class Scalar>
Matrix<Scalar> direct_sum(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  Matrix<Scalar> out = Matrix<Scalar>::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

template <class Scalar>
Scalar pairing(const Matrix<Scalar>& q, const Vector<Scalar>& u, const Vector<Scalar>& v) {
  return (u.transpose() * q * v)(0, 0);
}

template <class Scalar>
Vector<Scalar> unit_vector(Eigen::Index n, Eigen::Index i) {
  Vector<Scalar> v = Vector<Scalar>::Zero(n);
  v(i) = Scalar(1);
  return v;
}

IntMatrix hyperbolic_plane();
IntMatrix e8(bool negative);

// Determinant by Bareiss fraction-free elimination.
Integer determinant(const IntMatrix& a);
Eigen::Index matrix_rank(const IntMatrix& a);

FormInvariants invariants(const IntMatrix& q);

// Classification of indefinite unimodular forms by rank, signature and parity.
// Throws PreconditionError for definite or non-unimodular input.
bool indefinite_unimodular_iso(const IntMatrix& q1, const IntMatrix& q2);

struct AdmissibleReport {
  bool ok = true;
  std::vector<std::string> violations;  // one per failed clause, prefixed by the clause name
  FormInvariants form;
};

AdmissibleReport admissible_check(const IntMatrix& q, const IntVector& t1, const IntVector& s1,
                                  const IntVector& t2, const IntVector& s2);
AdmissibleReport admissible_check(const IntMatrix& q, const std::array<Eigen::Index, 4>& classes);

// sigma = alpha - (alpha.T2) S2 when alpha.alpha is odd.
std::optional<IntVector> complement_nonspin_witness(const IntMatrix& q, const IntVector& alpha,
                                                    const IntVector& t2, const IntVector& s2);

template <class Scalar>
struct SmithForm {
  std::vector<Scalar> factors;  // nonzero invariant factors d1 | d2 | ...
  Matrix<Scalar> U, V, D;       // U * A * V == D
};

namespace detail {
template <class Scalar>
Scalar abs_value(const Scalar& x) {
  return x < Scalar(0) ? Scalar(-x) : x;
}
template <class Scalar>
Scalar floor_div(const Scalar& a, const Scalar& b) {
  Scalar q = a / b;
  if ((a % b != Scalar(0)) && ((a < Scalar(0)) != (b < Scalar(0)))) q -= Scalar(1);
  return q;
}
}  // namespace detail

template <class Scalar>
SmithForm<Scalar> smith_normal_form(const Matrix<Scalar>& a) {
  using detail::abs_value;
  const Eigen::Index m = a.rows(), n = a.cols();
  Matrix<Scalar> D = a;
  Matrix<Scalar> U = Matrix<Scalar>::Identity(m, m);
  Matrix<Scalar> V = Matrix<Scalar>::Identity(n, n);
  SmithForm<Scalar> out;
  for (Eigen::Index t = 0; t < std::min(m, n); ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      Eigen::Index pi = -1, pj = -1;
      for (Eigen::Index i = t; i < m; ++i)
        for (Eigen::Index j = t; j < n; ++j)
          if (D(i, j) != Scalar(0) && (pi < 0 || abs_value(D(i, j)) < abs_value(D(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi < 0) goto done;
      D.row(t).swap(D.row(pi));
      U.row(t).swap(U.row(pi));
      D.col(t).swap(D.col(pj));
      V.col(t).swap(V.col(pj));
      bool clean = true;
      for (Eigen::Index i = t + 1; i < m; ++i) {
        if (D(i, t) == Scalar(0)) continue;
        const Scalar q = detail::floor_div(D(i, t), D(t, t));
        D.row(i) -= q * D.row(t);
        U.row(i) -= q * U.row(t);
        if (D(i, t) != Scalar(0)) clean = false;
      }
      for (Eigen::Index j = t + 1; j < n; ++j) {
        if (D(t, j) == Scalar(0)) continue;
        const Scalar q = detail::floor_div(D(t, j), D(t, t));
        D.col(j) -= q * D.col(t);
        V.col(j) -= q * V.col(t);
        if (D(t, j) != Scalar(0)) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold any offending row into row t and go again.
      Eigen::Index bad = -1;
      for (Eigen::Index i = t + 1; i < m && bad < 0; ++i)
        for (Eigen::Index j = t + 1; j < n; ++j)
          if (D(i, j) % D(t, t) != Scalar(0)) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      D.row(t) += D.row(bad);
      U.row(t) += U.row(bad);
    }
    if (D(t, t) < Scalar(0)) {
      D.row(t) *= Scalar(-1);
      U.row(t) *= Scalar(-1);
    }
    out.factors.push_back(D(t, t));
  }
done:
  out.U = std::move(U);
  out.V = std::move(V);
  out.D = std::move(D);
  return out;
}

// Integer solution x of A x = b, if one exists.
std::optional<IntVector> solve_integer(const IntMatrix& a, const IntVector& b);

// Row-style Hermite basis of the lattice spanned by the rows.
IntMatrix hermite_row_basis(const IntMatrix& rows);

// Orthogonal complement of a unimodular pair (t, s) with t.t = 0, t.s = 1 inside a
// unimodular form q. Each basis vector v decomposes as v = proj(v) + alpha T + beta S.
struct PairComplement {
  IntMatrix basis;                     // k x n, rows are complement classes
  IntMatrix form;                      // k x k Gram matrix of the basis
  std::vector<Eigen::Index> kept;      // original index when basis row is a unit vector, else -1
  IntMatrix coords;                    // k x n: column j = coordinates of proj(e_j) in the basis
  std::vector<Integer> alpha, beta;    // per original basis vector
};

PairComplement orthogonal_complement_of_pair(const IntMatrix& q, const IntVector& t, const IntVector& s);

}  // namespace twolink
