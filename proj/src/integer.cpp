#include "twolink/integer.hpp"

#include <limits>

namespace twolink {

Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(a, b);
}

Integer abs(const Integer& a) { return a < 0 ? Integer(-a) : a; }

int sign(const Integer& a) { return a.sign(); }

std::int64_t to_int64(const Integer& a) {
  if (a > std::numeric_limits<std::int64_t>::max() || a < std::numeric_limits<std::int64_t>::min())
    throw DimensionError("integer " + a.str() + " does not fit in 64 bits");
  return a.convert_to<std::int64_t>();
}

std::string to_string(const Integer& a) { return a.str(); }

ExpMatrix to_exp_matrix(const IntMatrix& m) {
  ExpMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_int64(m(i, j));
  return out;
}

IntMatrix from_rows(const std::vector<std::vector<long>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index m = n == 0 ? 0 : static_cast<Eigen::Index>(rows.front().size());
  IntMatrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m) throw DimensionError("ragged matrix rows");
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = rows[i][j];
  }
  return out;
}

}  // namespace twolink
