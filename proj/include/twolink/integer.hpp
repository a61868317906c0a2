#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace twolink {

// Expression templates off: Eigen's own expression machinery already covers
// the matrix side and nested templates only confuse its traits.
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = Matrix<Integer>;
using IntVector = Vector<Integer>;
// Small exponent/coordinate matrices (homology pushforwards, relator exponent sums).
using ExpMatrix = Matrix<std::int64_t>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct PreconditionError : Error {
  using Error::Error;
};
struct ConstructionError : Error {
  using Error::Error;
};
struct ParseError : Error {
  ParseError(const std::string& what, std::size_t pos)
      : Error(what + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

Integer gcd(const Integer& a, const Integer& b);
Integer abs(const Integer& a);
int sign(const Integer& a);
std::int64_t to_int64(const Integer& a);
std::string to_string(const Integer& a);

template <class Scalar>
Matrix<Scalar> cast_matrix(const ExpMatrix& m) {
  Matrix<Scalar> out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Scalar(m(i, j));
  return out;
}

ExpMatrix to_exp_matrix(const IntMatrix& m);
IntMatrix from_rows(const std::vector<std::vector<long>>& rows);

}  // namespace twolink
